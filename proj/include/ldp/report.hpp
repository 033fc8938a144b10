#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ldp {

/// One header block (resolved config) plus one data table, with optional named
/// summary scalars. CSV and JSON renderings carry identical numeric values
/// (doubles are emitted with 17 significant digits). No timestamps: a report
/// is a pure function of the configuration and seed.
struct Report {
  using Cell = std::variant<double, int64_t, std::string>;

  std::vector<std::pair<std::string, std::string>> config;  // insertion-ordered
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, double>> summary;

  void add_config(const std::string& key, const std::string& value) {
    config.emplace_back(key, value);
  }
};

std::string format_double(double v);

std::string to_csv(const Report& r);
std::string to_json(const Report& r);

/// Renders to the requested format and writes to `out` ("-" or empty: stdout).
void write_report(const Report& r, const std::string& format, const std::string& out);

}  // namespace ldp
