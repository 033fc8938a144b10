#include "ldp/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ldp/errors.hpp"

namespace ldp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const Report::Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<int64_t>(c)) return std::to_string(std::get<int64_t>(c));
  return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += "\"\"";
    else q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string to_csv(const Report& r) {
  std::ostringstream os;
  for (const auto& [k, v] : r.config) os << "# " << k << " = " << v << "\n";
  for (size_t i = 0; i < r.columns.size(); ++i) {
    if (i) os << ",";
    os << r.columns[i];
  }
  os << "\n";
  for (const auto& row : r.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << csv_escape(cell_text(row[i]));
    }
    os << "\n";
  }
  if (!r.summary.empty()) {
    os << "# summary\n";
    for (const auto& [k, v] : r.summary) os << "# " << k << " = " << format_double(v) << "\n";
  }
  return os.str();
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["columns"] = r.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<double>(c)) {
        double v = std::get<double>(c);
        if (std::isfinite(v))
          jr.push_back(v);
        else
          jr.push_back(format_double(v));  // inf/nan are not valid JSON numbers
      } else if (std::holds_alternative<int64_t>(c)) {
        jr.push_back(std::get<int64_t>(c));
      } else {
        jr.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(jr));
  }
  if (!r.summary.empty()) {
    j["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.summary) j["summary"][k] = v;
  }
  return j.dump(2) + "\n";
}

void write_report(const Report& r, const std::string& format, const std::string& out) {
  std::string text;
  if (format == "csv")
    text = to_csv(r);
  else if (format == "json")
    text = to_json(r);
  else
    throw Error(Errc::config, "unknown report format: " + format);
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(Errc::config, "cannot open output file: " + out);
  f << text;
}

}  // namespace ldp
