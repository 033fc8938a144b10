// Command-line front end: rate tables, tail approximations, validation
// studies, renewal diagnostics and Monte Carlo estimates over the built-in
// epoch models, emitted as deterministic CSV/JSON reports.
//
// Exit codes: 0 success, 2 configuration error, 3 partial failure (some rows
// errored), 4 total failure (every row errored).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "ldp/asymptotics.hpp"
#include "ldp/errors.hpp"
#include "ldp/exec.hpp"
#include "ldp/marginal.hpp"
#include "ldp/model.hpp"
#include "ldp/oracle.hpp"
#include "ldp/rate.hpp"
#include "ldp/renewal.hpp"
#include "ldp/report.hpp"
#include "ldp/simulate.hpp"

namespace {

using ldp::Report;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;
constexpr int kExitTotal = 4;

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int n = 0;

  std::vector<double> values() const {
    std::vector<double> v;
    if (n == 1) {
      v.push_back(lo);
      return v;
    }
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
  }
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char c1, c2;
  std::istringstream is(text);
  if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 1)
    throw ldp::Error(ldp::Errc::config, "grid must be lo:hi:n, got " + text);
  if (g.n > 1 && !(g.hi > g.lo))
    throw ldp::Error(ldp::Errc::config, "grid needs hi > lo: " + text);
  return g;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) v.push_back(std::stod(tok));
  }
  if (v.empty()) throw ldp::Error(ldp::Errc::config, "empty list: " + text);
  return v;
}

std::string errc_name(ldp::Errc c) {
  switch (c) {
    case ldp::Errc::config: return "config";
    case ldp::Errc::domain: return "domain";
    case ldp::Errc::rate_undefined: return "rate-undefined";
    case ldp::Errc::no_tilt: return "no-tilt";
    case ldp::Errc::violated_regularity: return "violated-regularity";
    case ldp::Errc::unsupported_tilt: return "unsupported-tilt";
    case ldp::Errc::quadrature: return "quadrature";
    case ldp::Errc::divergence: return "divergence";
    case ldp::Errc::nontermination: return "nontermination";
    case ldp::Errc::positivity: return "positivity";
  }
  return "error";
}

struct CommonOpts {
  std::string model_spec;
  std::string format = "csv";
  std::string out = "-";
  uint64_t seed = 1;
  int64_t n = 100000;
  double step = 0.01;
  bool serial = false;

  ldp::ExecMode mode() const { return serial ? ldp::ExecMode::serial : ldp::ExecMode::parallel; }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_model = true) {
  if (with_model)
    cmd->add_option("--model", o.model_spec,
                    "model spec: inline \"model=...; key=value\" or a path to a spec file")
        ->required();
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "output path ('-' = stdout)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--n", o.n, "number of Monte Carlo paths")->check(CLI::PositiveNumber);
  cmd->add_option("--step", o.step, "renewal grid step")->check(CLI::PositiveNumber);
  cmd->add_flag("--serial", o.serial, "run path loops serially (results are identical)");
}

void stamp_config(Report& rep, const CommonOpts& o, const std::string& subcommand) {
  rep.add_config("tool", "ldp_cli");
  rep.add_config("subcommand", subcommand);
  if (!o.model_spec.empty()) rep.add_config("model", o.model_spec);
  rep.add_config("seed", std::to_string(o.seed));
  rep.add_config("format", o.format);
}

// Rows run in parallel; the report keeps input order. Returns the exit code
// derived from per-row failures. Unexpected exceptions are marshaled out of
// the parallel region and rethrown.
template <typename RowFn>
int run_rows(int n_rows, Report& rep, const RowFn& fn, bool parallel) {
  std::vector<std::vector<Report::Cell>> rows(n_rows);
  std::vector<char> failed(n_rows, 0);
  std::exception_ptr failure;
  auto one = [&](int i) noexcept {
    try {
      failed[i] = fn(i, rows[i]) ? 0 : 1;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(ldp_row_failure)
#endif
      {
        if (!failure) failure = std::current_exception();
      }
      failed[i] = 1;
    }
  };
#ifdef _OPENMP
  if (parallel && n_rows > 1) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_rows; ++i) one(i);
  } else
#endif
  {
    for (int i = 0; i < n_rows; ++i) one(i);
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& r : rows) rep.rows.push_back(std::move(r));
  int n_failed = std::count(failed.begin(), failed.end(), 1);
  if (n_failed == 0) return kExitOk;
  return n_failed == n_rows ? kExitTotal : kExitPartial;
}

// ---------------------------------------------------------------------------

int cmd_list_models(const CommonOpts& o) {
  Report rep;
  stamp_config(rep, o, "list-models");
  rep.columns = {"model",  "parameters",        "x_nonneg", "y_span",
                 "beta_x", "t_lo",              "t_hi",     "first_passage_ok"};
  auto add = [&](const ldp::JointLaw& law, const std::string& params) {
    rep.rows.push_back({law.kind(), params, std::string(law.x_nonneg() ? "yes" : "no"),
                        law.y_span() ? Report::Cell(*law.y_span()) : Report::Cell(std::string("-")),
                        law.beta_x(), law.t_range().first, law.t_range().second,
                        std::string(law.y_mgf_everywhere() ? "yes" : "no")});
  };
  ldp::PoissonEpochLaw unit(ldp::PiecewisePoly::parse("0:1"), true);
  ldp::PoissonEpochLaw pe(ldp::PiecewisePoly::parse("0:1"));
  ldp::ThresholdLaw th(1.0);
  ldp::GaussSignLaw gs(1.0);
  ldp::ProductLaw pr(ldp::Marginal::exponential(1.0), ldp::Marginal::exponential(1.0));
  add(pe, "f = piecewise intensity, e.g. \"0:2 | 1:0.5\"");
  add(unit, "(none)");
  add(th, "M > 0");
  add(gs, "a > 0");
  add(pr, "x, y = exp(r) | gamma(k,r)");
  ldp::write_report(rep, o.format, o.out);
  return kExitOk;
}

int cmd_rate_table(const CommonOpts& o, const std::string& t_grid) {
  auto law = ldp::parse_model_spec(o.model_spec);
  GridSpec grid = parse_grid(t_grid);
  auto ts = grid.values();
  Report rep;
  stamp_config(rep, o, "rate-table");
  rep.add_config("t_grid", t_grid);
  rep.columns = {"t", "h", "h1", "h2", "hstar", "residual", "status"};
  int rc = run_rows(
      static_cast<int>(ts.size()), rep,
      [&](int i, std::vector<Report::Cell>& row) {
        double t = ts[i];
        try {
          ldp::RateEval re = ldp::rate_eval(*law, t);
          double residual = std::fabs(law->mgf_joint(t, -re.h) - 1.0);
          row = {t, re.h, re.h1, re.h2, t * re.h1 - re.h, residual, std::string("ok")};
          return true;
        } catch (const ldp::Error& e) {
          row = {t, 0.0, 0.0, 0.0, 0.0, 0.0, errc_name(e.code())};
          return false;
        }
      },
      !o.serial);
  ldp::write_report(rep, o.format, o.out);
  return rc;
}

struct TailArgs {
  std::string c_grid;
  std::string x_list;
  std::string regime = "auto";
  std::string shift;
  double x_max = 30.0;
};

int cmd_tail(const CommonOpts& o, const TailArgs& a) {
  auto law = ldp::parse_model_spec(o.model_spec);
  auto cs = parse_grid(a.c_grid).values();
  auto xs = parse_list(a.x_list);
  double shift_a = 0.0, shift_b = 0.0;
  bool shifted = !a.shift.empty();
  if (shifted) {
    auto sv = parse_list(a.shift);
    if (sv.size() != 2) throw ldp::Error(ldp::Errc::config, "--shift needs a,b");
    shift_a = sv[0];
    shift_b = sv[1];
  }
  std::string regime = a.regime;
  if (regime == "auto") regime = law->y_span() ? "lattice" : "nonlattice";

  Report rep;
  stamp_config(rep, o, "tail");
  rep.add_config("c_grid", a.c_grid);
  rep.add_config("x", a.x_list);
  rep.add_config("regime", regime);
  rep.add_config("step", ldp::format_double(o.step));
  rep.add_config("x_max", ldp::format_double(a.x_max));
  if (shifted) rep.add_config("shift", a.shift);
  if (regime == "lattice" && cs.size() > 1)
    rep.add_config("sweep_note",
                   "lattice slope sweeps are exploratory; the pointwise guarantee fixes one slope");
  rep.columns = {"c",    "x",    "regime",    "tau",
                 "hstar", "log_prob", "prob", "prefactor",
                 "lattice_correction", "shift_ratio", "status"};

  ldp::TailOptions topt;
  topt.profile_step = o.step;
  topt.profile_x_max = a.x_max;

  int n_rows = static_cast<int>(cs.size() * xs.size());
  int rc = run_rows(
      n_rows, rep,
      [&](int i, std::vector<Report::Cell>& row) {
        double c = cs[i / xs.size()];
        double x = xs[i % xs.size()];
        try {
          ldp::TailApprox ta;
          if (shifted)
            ta = ldp::tail_shifted(*law, c, x, shift_a, shift_b, topt);
          else if (regime == "lattice")
            ta = ldp::tail_lattice(*law, c, x, topt);
          else if (regime == "nonlattice")
            ta = ldp::tail_nonlattice(*law, c, x, topt);
          else if (regime == "first-passage")
            ta = ldp::tail_first_passage(*law, c, x, topt);
          else
            throw ldp::Error(ldp::Errc::config, "unknown regime: " + regime);
          row = {c,
                 x,
                 regime,
                 ta.tau,
                 ta.hstar,
                 ta.log_prob,
                 ta.prob,
                 ta.components.prefactor,
                 std::exp(ta.components.lattice_corr_log),
                 std::exp(ta.components.shift_log),
                 std::string("ok")};
          return true;
        } catch (const ldp::Error& e) {
          row = {c, x, regime, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, errc_name(e.code())};
          return false;
        }
      },
      !o.serial);
  ldp::write_report(rep, o.format, o.out);
  return rc;
}

struct ValidateArgs {
  std::string c_grid;
  std::string x_list;
  std::string oracle = "auto";  // exact | renewal | mc | auto
  std::string regime = "auto";
  double x_max = 30.0;
};

int cmd_validate(const CommonOpts& o, const ValidateArgs& a) {
  auto law = ldp::parse_model_spec(o.model_spec);
  auto cs = parse_grid(a.c_grid).values();
  auto xs = parse_list(a.x_list);

  std::string oracle = a.oracle;
  const bool unit_model = law->kind() == "poisson-epoch-unit";
  if (oracle == "auto") oracle = unit_model ? "exact" : "mc";

  std::string regime = a.regime;
  if (regime == "auto") regime = law->y_span() ? "lattice" : "nonlattice";

  Report rep;
  stamp_config(rep, o, "validate");
  rep.add_config("c_grid", a.c_grid);
  rep.add_config("x", a.x_list);
  rep.add_config("oracle", oracle);
  rep.add_config("regime", regime);
  rep.add_config("n", std::to_string(o.n));
  rep.add_config("step", ldp::format_double(o.step));
  if (regime == "lattice" && cs.size() > 1)
    rep.add_config("sweep_note",
                   "lattice slope sweeps are exploratory; the pointwise guarantee fixes one slope");
  // cutoff_ratio compares the plain Poisson count tail with the reward tail
  // (exact tier only); it approaches the slope c as x grows.
  rep.columns = {"c",         "x",    "approx",       "oracle_or_mc", "ratio",
                 "mc_stderr", "tier", "cutoff_ratio", "status"};

  ldp::TailOptions topt;
  topt.profile_step = o.step;
  topt.profile_x_max = a.x_max;

  struct Res {
    double c, x, ratio;
    bool ok;
  };
  std::vector<Res> results(cs.size() * xs.size());

  int n_rows = static_cast<int>(cs.size() * xs.size());
  int rc = run_rows(
      n_rows, rep,
      [&](int i, std::vector<Report::Cell>& row) {
        double c = cs[i / xs.size()];
        double x = xs[i % xs.size()];
        results[i] = {c, x, 0.0, false};
        try {
          ldp::TailApprox ta = regime == "lattice" ? ldp::tail_lattice(*law, c, x, topt)
                               : regime == "first-passage"
                                   ? ldp::tail_first_passage(*law, c, x, topt)
                                   : ldp::tail_nonlattice(*law, c, x, topt);
          double ref = 0.0, se = 0.0, cutoff = 0.0;
          if (oracle == "exact") {
            if (!unit_model)
              throw ldp::Error(ldp::Errc::config,
                               "the exact oracle tier needs poisson-epoch-unit");
            ref = ldp::unit_epoch_exact_tail(c, x);
            cutoff = ldp::unit_poisson_count_tail(c, x) / ref;
          } else if (oracle == "renewal") {
            // Prefactor cross-validation: reassemble the tail with the
            // renewal-profile limit in place of the closed prefactor.
            ldp::MgfProfileOptions mopt;
            mopt.first_passage = regime == "first-passage";
            auto prof = ldp::mgf_profile(*law, ta.tau, ldp::Grid{a.x_max, o.step}, mopt);
            double phi_renewal = prof.limit_estimate.value_or(0.0);
            ref = std::exp(ta.log_prob - std::log(ta.components.prefactor) +
                           std::log(phi_renewal));
          } else if (oracle == "mc") {
            ldp::SimEstimate mc = ldp::estimate_tail_tilted(
                *law, c, x, o.n, o.seed,
                regime == "first-passage" ? ldp::SimTarget::Wbar : ldp::SimTarget::W, o.mode());
            ref = mc.p_hat;
            se = mc.stderr_;
          } else {
            throw ldp::Error(ldp::Errc::config, "unknown oracle tier: " + oracle);
          }
          if (!(ref > 0.0))
            throw ldp::Error(ldp::Errc::domain, "oracle tier returned a nonpositive value");
          double ratio = ta.prob / ref;
          results[i] = {c, x, ratio, true};
          row = {c, x, ta.prob, ref, ratio, se, oracle, cutoff, std::string("ok")};
          return true;
        } catch (const ldp::Error& e) {
          row = {c, x, 0.0, 0.0, 0.0, 0.0,
                 std::string(e.code() == ldp::Errc::config ? "tier unavailable" : oracle), 0.0,
                 errc_name(e.code())};
          return false;
        }
      },
      !o.serial);

  // Empirical uniformity over the slope sweep: worst |ratio - 1| per x.
  for (double x : xs) {
    double worst = 0.0;
    bool any = false;
    for (const auto& r : results)
      if (r.ok && r.x == x) {
        worst = std::max(worst, std::fabs(r.ratio - 1.0));
        any = true;
      }
    if (any) {
      std::ostringstream key;
      key << "max_abs_ratio_err_x_" << x;
      rep.summary.emplace_back(key.str(), worst);
    }
  }
  ldp::write_report(rep, o.format, o.out);
  return rc;
}

struct SimulateArgs {
  std::string method = "tilted";  // crude | tilted
  std::string target = "W";       // W | Wbar
  double c = 0.0;
  std::string x_list;
};

int cmd_simulate(const CommonOpts& o, const SimulateArgs& a) {
  auto law = ldp::parse_model_spec(o.model_spec);
  auto xs = parse_list(a.x_list);
  Report rep;
  stamp_config(rep, o, "simulate");
  rep.add_config("method", a.method);
  rep.add_config("target", a.target);
  rep.add_config("c", ldp::format_double(a.c));
  rep.add_config("x", a.x_list);
  rep.add_config("n", std::to_string(o.n));
  rep.columns = {"method", "target", "c",    "x",         "n",           "p_hat",
                 "stderr", "rel_stderr", "hits", "mass_mean", "mass_stderr", "status"};
  int rc = run_rows(
      static_cast<int>(xs.size()), rep,
      [&](int i, std::vector<Report::Cell>& row) {
        double x = xs[i];
        try {
          ldp::SimEstimate est;
          if (a.method == "crude")
            est = ldp::estimate_tail_crude(*law, a.c, x, o.n, o.seed, o.mode());
          else if (a.method == "tilted")
            est = ldp::estimate_tail_tilted(
                *law, a.c, x, o.n, o.seed,
                a.target == "Wbar" ? ldp::SimTarget::Wbar : ldp::SimTarget::W, o.mode());
          else
            throw ldp::Error(ldp::Errc::config, "unknown method: " + a.method);
          double rel = est.p_hat > 0.0 ? est.stderr_ / est.p_hat : 0.0;
          std::string status = est.high_variance_warning ? "warn-high-variance" : "ok";
          row = {a.method, a.target,  a.c,      x,
                 est.n,    est.p_hat, est.stderr_, rel,
                 est.hits, est.mass_mean, est.mass_stderr, status};
          return true;
        } catch (const ldp::Error& e) {
          row = {a.method, a.target, a.c, x, o.n, 0.0, 0.0, 0.0,
                 static_cast<int64_t>(0), 0.0, 0.0, errc_name(e.code())};
          return false;
        }
      },
      false);  // row-level MC already parallelizes internally
  ldp::write_report(rep, o.format, o.out);
  return rc;
}

struct DensityArgs {
  std::string dist = "exp(1)";
  std::string windows;
  double width = 0.5;
};

int cmd_renewal_density(const CommonOpts& o, const DensityArgs& a) {
  ldp::Marginal law = ldp::Marginal::parse(a.dist);
  auto windows = parse_list(a.windows);
  Report rep;
  stamp_config(rep, o, "renewal-density");
  rep.add_config("dist", a.dist);
  rep.add_config("windows", a.windows);
  rep.add_config("width", ldp::format_double(a.width));
  rep.add_config("n", std::to_string(o.n));
  rep.columns = {"window_lo", "width", "q_hat", "stderr", "target", "z", "status"};
  ldp::DensityDiagnostic d =
      ldp::empirical_renewal_density(law, windows, a.width, o.n, o.seed, o.mode());
  for (size_t j = 0; j < d.window_lo.size(); ++j) {
    double z = d.stderr_[j] > 0.0 ? (d.q_hat[j] - d.target) / d.stderr_[j] : 0.0;
    rep.rows.push_back(
        {d.window_lo[j], d.width, d.q_hat[j], d.stderr_[j], d.target, z, std::string("ok")});
  }
  ldp::write_report(rep, o.format, o.out);
  return kExitOk;
}

struct ProfileArgs {
  double t = 0.5;
  double x_max = 30.0;
  bool first_passage = false;
};

int cmd_mgf_profile(const CommonOpts& o, const ProfileArgs& a) {
  auto law = ldp::parse_model_spec(o.model_spec);
  ldp::MgfProfileOptions mopt;
  mopt.first_passage = a.first_passage;
  ldp::RenewalProfile prof = ldp::mgf_profile(*law, a.t, ldp::Grid{a.x_max, o.step}, mopt);
  Report rep;
  stamp_config(rep, o, "mgf-profile");
  rep.add_config("t", ldp::format_double(a.t));
  rep.add_config("x_max", ldp::format_double(a.x_max));
  rep.add_config("step", ldp::format_double(o.step));
  rep.add_config("growth_rate", ldp::format_double(prof.growth_rate));
  rep.columns = {"x", "value", "normalized_value"};
  for (int k = 0; k < prof.n(); ++k) {
    double x = prof.x_at(k);
    double phi = prof.values[k];
    rep.rows.push_back({x, phi * std::exp(prof.growth_rate * x), phi});
  }
  if (prof.limit_estimate) rep.summary.emplace_back("limit_estimate", *prof.limit_estimate);
  if (prof.decay_rate_estimate)
    rep.summary.emplace_back("decay_rate_estimate", *prof.decay_rate_estimate);
  ldp::write_report(rep, o.format, o.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact large-deviation tail approximations for renewal reward processes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key-value config file mirroring the flags (flags win)");
  app.allow_config_extras(false);

  CommonOpts opts;
  std::string t_grid;
  TailArgs tail_args;
  ValidateArgs val_args;
  SimulateArgs sim_args;
  DensityArgs den_args;
  ProfileArgs prof_args;

  auto* c_list = app.add_subcommand("list-models", "built-in models and capability flags");
  add_common(c_list, opts, false);

  auto* c_rate = app.add_subcommand("rate-table", "h, h', h'' and the Legendre transform");
  add_common(c_rate, opts);
  c_rate->add_option("--t-grid", t_grid, "tilt grid lo:hi:n")->required();

  auto* c_tail = app.add_subcommand("tail", "tail approximations Pr{W(x) >= cx}");
  add_common(c_tail, opts);
  c_tail->add_option("--c-grid", tail_args.c_grid, "slope grid lo:hi:n")->required();
  c_tail->add_option("--x", tail_args.x_list, "comma-separated horizons")->required();
  c_tail->add_option("--regime", tail_args.regime, "auto|lattice|nonlattice|first-passage")
      ->check(CLI::IsMember({"auto", "lattice", "nonlattice", "first-passage"}));
  c_tail->add_option("--shift", tail_args.shift, "a,b for Pr{W(x+a) >= cx+b}");
  c_tail->add_option("--x-max", tail_args.x_max, "profile horizon for two-sided durations");

  auto* c_val = app.add_subcommand("validate", "approximation vs oracle/simulation ratios");
  add_common(c_val, opts);
  c_val->add_option("--c-grid", val_args.c_grid, "slope grid lo:hi:n")->required();
  c_val->add_option("--x", val_args.x_list, "comma-separated horizons")->required();
  c_val->add_option("--oracle", val_args.oracle, "auto|exact|renewal|mc")
      ->check(CLI::IsMember({"auto", "exact", "renewal", "mc"}));
  c_val->add_option("--regime", val_args.regime, "auto|lattice|nonlattice|first-passage")
      ->check(CLI::IsMember({"auto", "lattice", "nonlattice", "first-passage"}));
  c_val->add_option("--x-max", val_args.x_max, "profile horizon for two-sided durations");

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo tail estimates");
  add_common(c_sim, opts);
  c_sim->add_option("--method", sim_args.method, "crude|tilted")
      ->check(CLI::IsMember({"crude", "tilted"}));
  c_sim->add_option("--target", sim_args.target, "W|Wbar")
      ->check(CLI::IsMember({"W", "Wbar"}));
  c_sim->add_option("--c", sim_args.c, "slope of the event {value >= cx}")->required();
  c_sim->add_option("--x", sim_args.x_list, "comma-separated horizons")->required();

  auto* c_den = app.add_subcommand("renewal-density", "empirical renewal density windows");
  add_common(c_den, opts, false);
  c_den->add_option("--dist", den_args.dist, "driving law, exp(r) or gamma(k,r)");
  c_den->add_option("--windows", den_args.windows, "comma-separated window left edges")
      ->required();
  c_den->add_option("--width", den_args.width, "window width")->check(CLI::PositiveNumber);

  auto* c_prof = app.add_subcommand("mgf-profile", "renewal MGF profile as CSV/JSON");
  add_common(c_prof, opts);
  c_prof->add_option("--t", prof_args.t, "tilt parameter")->required();
  c_prof->add_option("--x-max", prof_args.x_max, "profile horizon");
  c_prof->add_flag("--first-passage", prof_args.first_passage, "profile of the first-passage sum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand(c_list)) return cmd_list_models(opts);
    if (app.got_subcommand(c_rate)) return cmd_rate_table(opts, t_grid);
    if (app.got_subcommand(c_tail)) return cmd_tail(opts, tail_args);
    if (app.got_subcommand(c_val)) return cmd_validate(opts, val_args);
    if (app.got_subcommand(c_sim)) return cmd_simulate(opts, sim_args);
    if (app.got_subcommand(c_den)) return cmd_renewal_density(opts, den_args);
    if (app.got_subcommand(c_prof)) return cmd_mgf_profile(opts, prof_args);
  } catch (const ldp::Error& e) {
    std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    return e.code() == ldp::Errc::config ? kExitConfig : kExitTotal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
