#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef LDP_CLI_PATH
#define LDP_CLI_PATH "ldp_cli"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
  std::string out_path = std::string("cli_out_") + tag + ".txt";
  std::string cmd = std::string(LDP_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(out_path.c_str());
  return {WEXITSTATUS(rc), ss.str()};
}

// Parses a CSV report: skips '#' lines, returns header + rows of cells.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    if (csv.header.empty())
      csv.header = cells;
    else
      csv.rows.push_back(cells);
  }
  return csv;
}

int column(const Csv& csv, const std::string& name) {
  for (size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("list-models names the five built-ins") {
  RunResult r = run_cli("list-models", "list");
  CHECK(r.exit_code == 0);
  for (const char* name : {"poisson-epoch", "poisson-epoch-unit", "threshold", "gauss-sign",
                           "independent-product"})
    CHECK(r.output.find(name) != std::string::npos);
}

TEST_CASE("rate table rows carry the closed-form rate") {
  RunResult r = run_cli("rate-table --model poisson-epoch-unit --t-grid 0.5:1.0:2", "rate");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  int ch = column(csv, "h");
  int cres = column(csv, "residual");
  int cst = column(csv, "status");
  REQUIRE(csv.rows.size() == 2);
  CHECK(std::stod(csv.rows[0][ch]) == doctest::Approx(std::exp(0.5) - 1.0).epsilon(1e-8));
  CHECK(std::stod(csv.rows[1][ch]) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-8));
  for (const auto& row : csv.rows) {
    CHECK(std::stod(row[cres]) < 1e-10);
    CHECK(row[cst] == "ok");
  }
}

TEST_CASE("zero-tilt row reduces to zero rate") {
  RunResult r = run_cli("rate-table --model poisson-epoch-unit --t-grid 0:0:1", "rate0");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  CHECK(std::stod(csv.rows[0][column(csv, "h")]) == 0.0);
  CHECK(std::stod(csv.rows[0][column(csv, "hstar")]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("auto regime selects the lattice form for integer rewards") {
  RunResult r = run_cli("tail --model poisson-epoch-unit --c-grid 2:2:1 --x 30", "auto");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  CHECK(csv.rows[0][column(csv, "regime")] == "lattice");
  RunResult r2 =
      run_cli("tail --model \"model=independent-product; x=exp(1); y=exp(1)\" --c-grid 2:2:1 "
              "--x 30",
              "auto2");
  REQUIRE(r2.exit_code == 0);
  Csv csv2 = parse_csv(r2.output);
  CHECK(csv2.rows[0][column(csv2, "regime")] == "nonlattice");
}

TEST_CASE("shifted rows expose the exact ratio factor") {
  std::string model = "\"model=independent-product; x=exp(1); y=exp(1)\"";
  RunResult base = run_cli("tail --model " + model + " --c-grid 2:2:1 --x 40", "shb");
  RunResult sh = run_cli("tail --model " + model + " --c-grid 2:2:1 --x 40 --shift 1.5,0.5",
                         "shs");
  REQUIRE(base.exit_code == 0);
  REQUIRE(sh.exit_code == 0);
  Csv cb = parse_csv(base.output), cs = parse_csv(sh.output);
  double tau = std::stod(cs.rows[0][column(cs, "tau")]);
  double lp_base = std::stod(cb.rows[0][column(cb, "log_prob")]);
  double lp_shift = std::stod(cs.rows[0][column(cs, "log_prob")]);
  double ratio = std::stod(cs.rows[0][column(cs, "shift_ratio")]);
  // h(tau) for exponential marginals is tau/(1-tau)
  double h = tau / (1.0 - tau);
  CHECK(ratio == doctest::Approx(std::exp(1.5 * h - 0.5 * tau)).epsilon(1e-12));
  CHECK(lp_shift - lp_base == doctest::Approx(1.5 * h - 0.5 * tau).epsilon(1e-10));
}

TEST_CASE("validate emits ratios and a uniformity summary") {
  RunResult r = run_cli(
      "validate --model poisson-epoch-unit --c-grid 1.8:2.2:3 --x 20,40 --oracle exact", "val");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  REQUIRE(csv.rows.size() == 6);
  int cr = column(csv, "ratio");
  for (const auto& row : csv.rows) {
    double ratio = std::stod(row[cr]);
    CHECK(ratio > 0.5);
    CHECK(ratio < 1.5);
  }
  CHECK(r.output.find("max_abs_ratio_err_x_20") != std::string::npos);
  CHECK(r.output.find("max_abs_ratio_err_x_40") != std::string::npos);
}

TEST_CASE("missing oracle tier is reported per row") {
  RunResult r = run_cli(
      "validate --model \"model=threshold; M=1\" --c-grid 0.6:0.6:1 --x 10 --oracle exact",
      "tier");
  CHECK(r.exit_code == 4);  // every row lacks the tier
  CHECK(r.output.find("tier unavailable") != std::string::npos);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  std::string args =
      "simulate --model poisson-epoch-unit --method tilted --c 2 --x 25 --n 20000 --seed 33";
  RunResult a = run_cli(args, "det1");
  RunResult b = run_cli(args, "det2");
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  RunResult c = run_cli(
      "simulate --model poisson-epoch-unit --method tilted --c 2 --x 25 --n 20000 --seed 34",
      "det3");
  CHECK(a.output != c.output);
}

TEST_CASE("csv and json carry identical numeric values") {
  std::string base = "tail --model poisson-epoch-unit --c-grid 1.6:2.4:3 --x 20,40";
  RunResult rc = run_cli(base + " --format csv", "fmt1");
  RunResult rj = run_cli(base + " --format json", "fmt2");
  REQUIRE(rc.exit_code == 0);
  REQUIRE(rj.exit_code == 0);
  Csv csv = parse_csv(rc.output);
  auto j = nlohmann::json::parse(rj.output);
  auto cols = j["columns"].get<std::vector<std::string>>();
  REQUIRE(cols.size() == csv.header.size());
  REQUIRE(j["rows"].size() == csv.rows.size());
  for (size_t i = 0; i < csv.rows.size(); ++i)
    for (size_t k = 0; k < cols.size(); ++k) {
      const auto& cell = j["rows"][i][k];
      if (cell.is_number()) {
        double jv = cell.get<double>();
        double cv = std::stod(csv.rows[i][k]);
        CHECK(jv == cv);  // exact: both sides round-trip through 17 digits
      } else {
        CHECK(cell.get<std::string>() == csv.rows[i][k]);
      }
    }
}

TEST_CASE("config file mirrors flags and flags win") {
  {
    std::ofstream cfg("cli_cfg_test.ini");
    cfg << "[simulate]\nseed=9\nn=5000\n";
  }
  std::string args =
      "simulate --model poisson-epoch-unit --method crude --c 1.2 --x 10 --config "
      "cli_cfg_test.ini --seed 5";
  RunResult r = run_cli(args, "cfg");
  std::remove("cli_cfg_test.ini");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("# seed = 5") != std::string::npos);  // flag beats the file
  CHECK(r.output.find("# n = 5000") != std::string::npos);  // file fills the gap
}

TEST_CASE("exit codes: config, partial and total failure") {
  CHECK(run_cli("tail --model poisson-epoch-unit", "cfgerr").exit_code == 2);  // missing flags
  CHECK(run_cli("rate-table --model \"model=threshold\" --t-grid 0.5:1:2", "badmodel")
            .exit_code == 2);  // missing M
  // two-sided model beyond its feasible tilt on part of the grid
  RunResult part = run_cli(
      "rate-table --model \"model=gauss-sign; a=0.5\" --t-grid 0.4:3.0:2 --serial", "part");
  CHECK(part.exit_code == 3);
  CHECK(part.output.find("rate-undefined") != std::string::npos);
  RunResult total = run_cli(
      "rate-table --model \"model=gauss-sign; a=0.5\" --t-grid 3.0:4.0:2 --serial", "tot");
  CHECK(total.exit_code == 4);
}

TEST_CASE("mgf-profile emits the grid with raw and normalized values") {
  RunResult r = run_cli(
      "mgf-profile --model poisson-epoch-unit --t 0.5 --x-max 10 --step 0.05", "prof");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  CHECK(csv.header == std::vector<std::string>{"x", "value", "normalized_value"});
  CHECK(csv.rows.size() == 201);
  int cn = column(csv, "normalized_value");
  double last = std::stod(csv.rows.back()[cn]);
  CHECK(last == doctest::Approx(std::exp(-0.5)).epsilon(0.02));
  CHECK(r.output.find("limit_estimate") != std::string::npos);
}

TEST_CASE("--out writes the report to a file") {
  std::string path = "cli_out_file_test.csv";
  RunResult r = run_cli("rate-table --model poisson-epoch-unit --t-grid 1:1:1 --out " + path,
                        "outfile");
  CHECK(r.exit_code == 0);
  CHECK(r.output.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  in.close();
  std::remove(path.c_str());
  Csv csv = parse_csv(ss.str());
  REQUIRE(csv.rows.size() == 1);
  CHECK(std::stod(csv.rows[0][column(csv, "h")]) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));
}

TEST_CASE("renewal-density subcommand reports flat unit-rate windows") {
  RunResult r = run_cli(
      "renewal-density --dist \"exp(1)\" --windows 1,4 --width 0.5 --n 20000 --seed 2", "den");
  REQUIRE(r.exit_code == 0);
  Csv csv = parse_csv(r.output);
  int cz = column(csv, "z");
  for (const auto& row : csv.rows) CHECK(std::fabs(std::stod(row[cz])) < 4.0);
}
