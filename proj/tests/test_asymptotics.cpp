#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldp/asymptotics.hpp"
#include "ldp/errors.hpp"
#include "ldp/model.hpp"
#include "ldp/rate.hpp"
#include "ldp/renewal.hpp"
#include "ldp/simulate.hpp"
#include "oracles.hpp"

using namespace ldp;

namespace {
PoissonEpochLaw make_unit() { return PoissonEpochLaw(PiecewisePoly::parse("0:1"), true); }
}  // namespace

TEST_CASE("prefactor integral: unit model closed form") {
  auto unit = make_unit();
  for (double t : {0.5, 1.0}) {
    double h = solve_h(unit, t);
    double B = prefactor_B(unit, t, h);
    double denom = unit.tilted_moment(t, -h, 1, 0);
    CHECK(B == doctest::Approx(denom * std::exp(-t)).epsilon(1e-10));
    Prefactor pf = prefactor(unit, t, h, PrefactorVariant::standard);
    CHECK(pf.phi == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(pf.phi == pf.B / pf.denom);
  }
}

TEST_CASE("prefactor integral: zero-rate branch returns the mean duration") {
  auto unit = make_unit();
  CHECK(prefactor_B(unit, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  ThresholdLaw th(1.0);
  CHECK(prefactor_B(th, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prefactor branches join continuously near h = 0") {
  auto unit = make_unit();
  // series: (1 - E[e^{-hX}])/h = E[X] - h E[X^2]/2 + O(h^2); E[X^2] = 2 here
  double ex = 1.0, ex2 = 2.0;
  CHECK(std::fabs(prefactor_B(unit, 0.0, 1e-9 * 2.0) - ex) <= 1e-6 * ex);
  for (double h : {1e-6, 1e-7, 1e-8}) {
    double lhs = std::fabs(prefactor_B(unit, 0.0, h * 1.0000001) - ex);
    CHECK(lhs <= 1.1 * ex2 * h + 1e-12);
  }
}

TEST_CASE("first-passage prefactor: threshold closed forms") {
  ThresholdLaw th(1.0);
  double t = 0.8, h = solve_h(th, t);
  double Bb = prefactor_B_bar(th, t, h);
  // E[e^{tY - hX}] = 1 collapses the subtracted term
  CHECK(Bb == doctest::Approx((th.mgf_joint(t, 0.0) - 1.0) / h).epsilon(1e-10));
  // definition route: int_0^inf e^{-hu} E[e^{tY} 1{X>u}] du
  double direct = oracle::simpson([&](double u) { return std::exp(-h * u) * th.y_mgf_tail(t, u); },
                                  0.0, 60.0, 40000);
  CHECK(Bb == doctest::Approx(direct).epsilon(1e-8));
  // phi_bar / phi two ways: via prefactor bundles and via the raw integrals
  double B = prefactor_B(th, t, h);
  Prefactor p1 = prefactor(th, t, h, PrefactorVariant::standard);
  Prefactor p2 = prefactor(th, t, h, PrefactorVariant::first_passage);
  CHECK(p2.phi / p1.phi == doctest::Approx(Bb / B).epsilon(1e-10));
}

TEST_CASE("first-passage prefactor reduces to the standard one at t = 0") {
  ThresholdLaw th(1.3);
  CHECK(prefactor_B_bar(th, 0.0, 0.0) == doctest::Approx(prefactor_B(th, 0.0, 0.0)).epsilon(1e-12));
}

TEST_CASE("first-passage prefactor factorizes for independent marginals") {
  ProductLaw pr(Marginal::exponential(1.0), Marginal(2, 2.0));
  double t = 0.6, h = solve_h(pr, t);
  double Bb = prefactor_B_bar(pr, t, h);
  double ey = pr.mgf_joint(t, 0.0);
  double ref = ey * (1.0 - pr.mgf_joint(0.0, -h)) / h;
  CHECK(Bb == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("prefactor positivity across the admissible tilt grid") {
  auto unit = make_unit();
  ThresholdLaw th(1.0);
  ProductLaw pr(Marginal::exponential(1.0), Marginal(2, 2.0));
  for (double t : {0.2, 0.6, 1.0, 1.4}) {
    for (const JointLaw* law : std::initializer_list<const JointLaw*>{&unit, &th, &pr}) {
      double h = solve_h(*law, t);
      CHECK(prefactor(*law, t, h, PrefactorVariant::standard).phi > 0.0);
      if (std::isfinite(law->mgf_joint(t, 0.0)))
        CHECK(prefactor(*law, t, h, PrefactorVariant::first_passage).phi > 0.0);
    }
  }
  GaussSignLaw gs(0.5);
  for (double frac : {0.3, 0.5, 0.7}) {
    double t = frac * gs.t_range().second;
    double h = solve_h(gs, t);
    MgfProfileOptions mopt;
    mopt.h_override = h;
    auto prof = mgf_profile(gs, t, Grid{25.0, 0.02}, mopt);
    Prefactor pf = prefactor(gs, t, h, PrefactorVariant::standard, &prof);
    CHECK(pf.phi > 0.0);
    // the renewal limit estimates the same constant
    CHECK(pf.phi == doctest::Approx(*prof.limit_estimate).epsilon(1e-3));
  }
}

TEST_CASE("three-way prefactor agreement for the unit model") {
  auto unit = make_unit();
  for (double t : {0.5, 1.0}) {
    double h = solve_h(unit, t);
    double closed = std::exp(-t);
    double via_B = prefactor(unit, t, h, PrefactorVariant::standard).phi;
    auto prof = mgf_profile(unit, t, Grid{60.0, 0.01});
    double via_renewal = *prof.limit_estimate;
    CHECK(std::fabs(closed - via_B) <= 1e-3);
    CHECK(std::fabs(closed - via_renewal) <= 1e-3);
    CHECK(std::fabs(via_B - via_renewal) <= 1e-3);
  }
}

TEST_CASE("fractional-part helper snaps integers") {
  CHECK(frac_ceil(7.0) == 0.0);
  CHECK(frac_ceil(7.0 + 3e-10) == 0.0);
  CHECK(frac_ceil(7.0 - 3e-10) == 0.0);
  CHECK(frac_ceil(20.5) == doctest::Approx(0.5));
  CHECK(frac_ceil(20.25) == doctest::Approx(0.75));
}

TEST_CASE("lattice tail matches the worked closed form exactly") {
  auto unit = make_unit();
  for (double T : {1.5, 2.0})
    for (double x : {10.0, 30.0}) {
      TailApprox ta = tail_lattice(unit, T, x);
      double closed = std::pow(T, -std::ceil(T * x)) * std::exp((T - 1.0) * x) /
                      (std::sqrt(2.0 * M_PI * T * x) * (T - 1.0));
      CHECK(ta.prob == doctest::Approx(closed).epsilon(1e-9));
      CHECK(ta.regime == Regime::lattice);
    }
}

TEST_CASE("assembly identity for the log probability") {
  auto unit = make_unit();
  TailApprox ta = tail_lattice(unit, 2.0, 25.0);
  double expect = std::log(ta.components.prefactor) + ta.components.sqrt_term_log +
                  ta.components.lattice_corr_log - 25.0 * ta.hstar + ta.components.shift_log;
  CHECK(ta.log_prob == expect);
  CHECK(ta.prob == std::exp(ta.log_prob));
  // integer product c*x leaves no fractional correction
  double d = 1.0, tau = ta.tau;
  CHECK(ta.components.lattice_corr_log ==
        doctest::Approx(std::log(d) - std::log1p(-std::exp(-tau * d))).epsilon(1e-12));
}

TEST_CASE("nonlattice tail: components and convergence of the log rate") {
  ProductLaw pr(Marginal::exponential(1.0), Marginal::exponential(1.0));
  double c = 2.0;
  double hstar = 0.0;
  {
    TailApprox t50 = tail_nonlattice(pr, c, 50.0);
    TailApprox t100 = tail_nonlattice(pr, c, 100.0);
    hstar = t50.hstar;
    double d50 = std::fabs(t50.log_prob / 50.0 + hstar);
    double d100 = std::fabs(t100.log_prob / 100.0 + hstar);
    CHECK(d100 < d50);  // the exponent dominates as x grows
    double expect = std::log(t50.components.prefactor) - std::log(t50.tau) +
                    t50.components.sqrt_term_log - 50.0 * t50.hstar;
    CHECK(t50.log_prob == expect);
  }
  // closed-form rate for exponential marginals: h(t) = t/(1-t)
  double tau = solve_tau(pr, c);
  CHECK(rate_eval(pr, tau).h1 == doctest::Approx(c).epsilon(1e-9));
  CHECK(hstar == doctest::Approx(tau * c - tau / (1.0 - tau)).epsilon(1e-9));
}

TEST_CASE("nonlattice tail against importance sampling") {
  ProductLaw pr(Marginal::exponential(1.0), Marginal::exponential(1.0));
  double c = 2.0;
  // the asymptotic error is o(1): check that it shrinks and ends small
  double prev = 1e9, last = 0.0;
  for (double x : {25.0, 50.0, 100.0}) {
    TailApprox ta = tail_nonlattice(pr, c, x);
    SimEstimate mc = estimate_tail_tilted(pr, c, x, 200000, 404);
    double err = std::fabs(ta.prob / mc.p_hat - 1.0);
    CHECK(err < prev);
    prev = err;
    last = err;
  }
  CHECK(last < 0.05);
}

TEST_CASE("shifted tail: exact reduction and ratio identity") {
  ProductLaw pr(Marginal::exponential(1.0), Marginal(2, 2.0));
  double c = 1.5, x = 40.0;
  TailApprox base = tail_nonlattice(pr, c, x);
  TailApprox same = tail_shifted(pr, c, x, 0.0, 0.0);
  CHECK(same.log_prob == base.log_prob);
  CHECK(same.prob == base.prob);
  CHECK(same.regime == Regime::nonlattice);

  double a = 1.25, b = 0.75;
  TailApprox sh = tail_shifted(pr, c, x, a, b);
  CHECK(sh.regime == Regime::shifted);
  CHECK(sh.log_prob == base.log_prob + (a * sh.components.h - b * sh.tau));
}

TEST_CASE("shifted tail against importance sampling of the shifted event") {
  ProductLaw pr(Marginal::exponential(1.0), Marginal::exponential(1.0));
  double c = 2.0, x = 50.0, a = 1.0, b = 1.0;
  TailApprox sh = tail_shifted(pr, c, x, a, b);
  // Pr{W(x + a) >= c x + b} by tilted sampling at the same slope
  double tau = solve_tau(pr, c);
  double h = solve_h(pr, tau);
  const int n = 200000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    SplitRng r(2718, i);
    PathOutcome po = simulate_path_tilted(pr, x + a, tau, h, r);
    double est = po.w >= c * x + b ? std::exp(po.log_weight) : 0.0;
    acc += est;
    acc2 += est * est;
  }
  acc /= n;
  double se = std::sqrt((acc2 / n - acc * acc) / (n - 1));
  CHECK(std::fabs(sh.prob / acc - 1.0) < 0.10);
  CHECK(se / acc < 0.05);
}

TEST_CASE("first-passage tail: supported models only") {
  auto unit = make_unit();
  CHECK_THROWS_AS(tail_first_passage(unit, 2.0, 40.0), Error);
  ThresholdLaw th(1.0);
  TailApprox ta = tail_first_passage(th, 0.6, 12.0);
  CHECK(ta.regime == Regime::first_passage);
  // the first-passage sum dominates the plain one for nonnegative rewards
  TailApprox plain = tail_lattice(th, 0.6, 12.0);
  CHECK(ta.prob > plain.prob);
}

TEST_CASE("first-passage tail against crude simulation at a moderate deviation") {
  ThresholdLaw th(1.0);
  double c = 0.65, x = 14.0;
  TailApprox ta = tail_first_passage(th, c, x);
  double thr = event_threshold(th, c, x);
  const int n = 400000;
  double hits = 0.0;
  for (int i = 0; i < n; ++i) {
    SplitRng r(515, i);
    PathOutcome po = simulate_path(th, x, r);
    if (po.wbar >= thr - 1e-9) hits += 1.0;
  }
  double p = hits / n, se = std::sqrt(p * (1.0 - p) / n);
  // o(1) asymptotic error at desk scale: generous band plus noise allowance
  CHECK(std::fabs(ta.prob - p) <= 0.15 * p + 3.0 * se);
}

TEST_CASE("general intensity: lattice tail against importance sampling") {
  PoissonEpochLaw poly(PiecewisePoly::parse("0:0.5,0.5 | 2:1.5"));
  double c = rate_eval(poly, 0.6).h1;
  double prev = 1e9;
  for (double x : {12.0, 24.0, 48.0}) {
    TailApprox ta = tail_lattice(poly, c, x);
    SimEstimate mc = estimate_tail_tilted(poly, c, x, 100000, 5);
    double err = std::fabs(ta.prob / mc.p_hat - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.10);
}

TEST_CASE("two-sided model: lattice tail against importance sampling") {
  GaussSignLaw gs(0.5);
  double tau = 0.55 * gs.t_range().second;
  double c = rate_eval(gs, tau).h1;
  double prev = 1e9;
  for (double x : {15.0, 30.0, 60.0}) {
    TailApprox ta = tail_lattice(gs, c, x);
    SimEstimate mc = estimate_tail_tilted(gs, c, x, 60000, 999);
    double err = std::fabs(ta.prob / mc.p_hat - 1.0);
    CHECK(err < prev);
    prev = err;
    if (x == 60.0) CHECK(err < 0.08);
  }
}

TEST_CASE("lattice correction factor averages to one over a uniform sweep") {
  // At span-times-slope d*tau -> 0 the lattice correction, averaged over the
  // fractional position of the threshold, recovers the smooth 1/tau factor.
  double d = 1.0, tau = 0.01;
  const int n = 4096;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double frac = (i + 0.5) / n;
    acc += d * tau * std::exp(-d * tau * frac) / (1.0 - std::exp(-tau * d));
  }
  acc /= n;
  CHECK(std::fabs(acc - 1.0) <= 0.01);
}

TEST_CASE("two-sided model: first-passage tail against importance sampling") {
  GaussSignLaw gs(0.5);
  double tau = 0.55 * gs.t_range().second;
  double c = rate_eval(gs, tau).h1;
  TailApprox fp15 = tail_first_passage(gs, c, 15.0);
  TailApprox fp60 = tail_first_passage(gs, c, 60.0);
  SimEstimate m15 = estimate_tail_tilted(gs, c, 15.0, 60000, 999, SimTarget::Wbar);
  SimEstimate m60 = estimate_tail_tilted(gs, c, 60.0, 60000, 999, SimTarget::Wbar);
  double e15 = std::fabs(fp15.prob / m15.p_hat - 1.0);
  double e60 = std::fabs(fp60.prob / m60.p_hat - 1.0);
  CHECK(e60 < e15);
  CHECK(e60 < 0.06);
  // the crossing epoch's reward enlarges the prefactor here
  TailApprox plain = tail_lattice(gs, c, 60.0);
  CHECK(fp60.components.prefactor > plain.components.prefactor);
}

TEST_CASE("regime guards") {
  auto unit = make_unit();
  CHECK_THROWS_AS(tail_nonlattice(unit, 2.0, 10.0), Error);  // lattice rewards
  CHECK_THROWS_AS(tail_shifted(unit, 2.0, 10.0, 1.0, 0.0), Error);
  ProductLaw pr(Marginal::exponential(1.0), Marginal::exponential(1.0));
  CHECK_THROWS_AS(tail_lattice(pr, 2.0, 10.0), Error);  // no reward span
  // tau <= 0: slope below the typical growth is not a large deviation
  CHECK_THROWS_AS(tail_lattice(unit, 0.5, 10.0), Error);
}

TEST_CASE("two-sided prefactor requires a profile") {
  GaussSignLaw gs(0.5);
  double t = 0.45, h = solve_h(gs, t);
  CHECK_THROWS_AS(prefactor_B(gs, t, h, nullptr), Error);
}
