#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldp/errors.hpp"
#include "ldp/model.hpp"
#include "ldp/rate.hpp"
#include "oracles.hpp"

using namespace ldp;

namespace {
PoissonEpochLaw make_unit() { return PoissonEpochLaw(PiecewisePoly::parse("0:1"), true); }
}  // namespace

TEST_CASE("rate root: closed form for the unit epoch model") {
  auto unit = make_unit();
  for (double t : {0.25, 0.5, 1.0, 1.5})
    CHECK(solve_h(unit, t) == doctest::Approx(std::expm1(t)).epsilon(1e-12));
}

TEST_CASE("h(0) = 0 for every model") {
  CHECK(solve_h(make_unit(), 0.0) == 0.0);
  CHECK(solve_h(ThresholdLaw(2.0), 0.0) == 0.0);
  CHECK(solve_h(GaussSignLaw(0.5), 0.0) == 0.0);
  CHECK(solve_h(ProductLaw(Marginal::exponential(1.0), Marginal::exponential(1.0)), 0.0) == 0.0);
}

TEST_CASE("rate root: threshold model against the scalar bisection") {
  for (double m : {0.5, 1.0, 2.0})
    for (double t : {0.5, 1.0}) {
      ThresholdLaw law(m);
      double h = solve_h(law, t);
      double ref = oracle::threshold_rate_root(m, t);
      CHECK(h == doctest::Approx(ref).epsilon(1e-10));
      // the implicit equation the root must satisfy
      CHECK(std::fabs(h * std::exp(m * h) - std::exp(-m) * std::expm1(t)) <= 1e-8);
    }
  // frozen spot value from the independent long-double run
  CHECK(solve_h(ThresholdLaw(1.0), 1.0) ==
        doctest::Approx(oracle::kThresholdRootM1T1).epsilon(1e-12));
}

TEST_CASE("root residual and certification hold wherever the solver succeeds") {
  GaussSignLaw gs(0.5);
  auto [lo, hi] = gs.t_range();
  for (int i = 1; i <= 8; ++i) {
    double t = lo + (hi - lo) * i / 9.0;
    double h = solve_h(gs, t);
    CHECK(h < 0.0);  // the worked two-sided model has a negative rate
    CHECK(std::fabs(gs.mgf_joint(t, -h) - 1.0) <= 1e-12);
    CHECK(gs.tilted_moment(t, -h, 1, 0) > 0.0);
  }
}

TEST_CASE("derivatives: closed forms") {
  auto unit = make_unit();
  for (double t : {0.25, 1.0}) {
    auto [h1, h2] = rate_derivatives(unit, t, solve_h(unit, t));
    CHECK(h1 == doctest::Approx(std::exp(t)).epsilon(1e-10));
    CHECK(h2 == doctest::Approx(std::exp(t)).epsilon(1e-10));
  }
  // independent marginals: h'(0) = E[Y]/E[X]
  ProductLaw pr(Marginal(2, 1.0), Marginal::exponential(2.0));  // EX = 2, EY = 1/2
  auto [h1, h2] = rate_derivatives(pr, 0.0, 0.0);
  CHECK(h1 == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(h2 > 0.0);
}

TEST_CASE("derivatives agree with central differences of the root") {
  auto unit = make_unit();
  ThresholdLaw th(1.0);
  for (const JointLaw* law : std::initializer_list<const JointLaw*>{&unit, &th}) {
    double t = 0.8;
    RateEval re = rate_eval(*law, t);
    auto hfun = [&](double u) { return solve_h(*law, u); };
    double e_prev = 1.0;
    for (double d : {1e-4, 1e-5}) {
      double fd1 = oracle::central_diff(hfun, t, d);
      double err1 = std::fabs(fd1 - re.h1) / std::fabs(re.h1);
      CHECK(err1 <= 1e-4);
      CHECK(err1 <= e_prev);  // Richardson sanity: smaller step, smaller error
      e_prev = err1;
      double fd2 = (hfun(t + d) - 2.0 * re.h + hfun(t - d)) / (d * d);
      CHECK(std::fabs(fd2 - re.h2) / std::fabs(re.h2) <= 1e-4);
    }
  }
}

TEST_CASE("convexity of the rate on evaluation grids") {
  auto check = [](const JointLaw& law, double lo, double hi) {
    const int n = 11;
    std::vector<double> ts(n), hs(n);
    for (int i = 0; i < n; ++i) {
      ts[i] = lo + (hi - lo) * i / (n - 1);
      hs[i] = solve_h(law, ts[i]);
    }
    for (int i = 1; i + 1 < n; ++i) {
      double chord = ((ts[i + 1] - ts[i]) * hs[i - 1] + (ts[i] - ts[i - 1]) * hs[i + 1]) /
                     (ts[i + 1] - ts[i - 1]);
      CHECK(hs[i] <= chord + 1e-10);
    }
    // monotone slope justifies bisection in the slope solver
    double prev = -1e300;
    for (int i = 0; i < n; ++i) {
      double h1 = rate_derivatives(law, ts[i], hs[i]).first;
      CHECK(h1 > prev);
      prev = h1;
    }
  };
  check(make_unit(), -0.5, 1.5);
  check(ThresholdLaw(1.0), -0.5, 2.0);
  GaussSignLaw gs(0.5);
  check(gs, 0.1 * gs.t_range().second, 0.9 * gs.t_range().second);
}

TEST_CASE("Fenchel identity to 1e-10") {
  auto unit = make_unit();
  ThresholdLaw th(0.8);
  for (const JointLaw* law : std::initializer_list<const JointLaw*>{&unit, &th})
    for (double tau : {0.3, 0.9, 1.4}) {
      RateEval re = rate_eval(*law, tau);
      double l = legendre(*law, tau);
      CHECK(std::fabs(l + re.h - tau * re.h1) <= 1e-10);
    }
}

TEST_CASE("Legendre value matches a grid search of the defining supremum") {
  auto unit = make_unit();
  double tau = std::log(2.0);
  double nu = rate_eval(unit, tau).h1;
  double l = legendre(unit, tau);
  // closed form for this model
  CHECK(l == doctest::Approx(nu * std::log(nu) - nu + 1.0).epsilon(1e-10));
  double best = -1e300;
  for (double t = -1.0; t <= 2.5; t += 1e-4)
    best = std::max(best, nu * t - solve_h(unit, t));
  CHECK(best == doctest::Approx(l).epsilon(1e-8));
  CHECK(legendre(unit, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("slope solver") {
  auto unit = make_unit();
  for (double T : {1.5, 2.0, 3.0})
    CHECK(solve_tau(unit, T) == doctest::Approx(std::log(T)).epsilon(1e-9));
  CHECK(solve_tau(unit, 1.0) == doctest::Approx(0.0).epsilon(1e-7));

  ThresholdLaw th(1.0);
  double c = 0.6;  // inside (e^{-1}, 1)
  double tau = solve_tau(th, c);
  CHECK(tau > 0.0);
  CHECK(rate_eval(th, tau).h1 == doctest::Approx(c).epsilon(1e-9));

  // outside the attainable range: error reports the range
  try {
    solve_tau(th, 1.5);  // above 1/M = 1
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_tilt);
    CHECK(e.payload_a() < 1.5);
    CHECK(e.payload_b() < 1.5);
    CHECK(e.payload_b() <= 1.0 + 1e-6);
  }
}

TEST_CASE("property: random thresholds and tilts keep the rate contracts") {
  // hand-rolled generator sweep: residual, certification, Fenchel and the
  // quadrature cross-check at randomly drawn parameters
  SplitRng gen(20260808, 0);
  for (int trial = 0; trial < 25; ++trial) {
    double m = 0.3 + 2.7 * gen.next_double();
    double t = -1.0 + 3.0 * gen.next_double();
    ThresholdLaw law(m);
    double h = solve_h(law, t);
    CHECK(std::fabs(law.mgf_joint(t, -h) - 1.0) <= 1e-12);
    CHECK(law.tilted_moment(t, -h, 1, 0) > 0.0);
    CHECK(law.mgf_joint_quadrature(t, -h) == doctest::Approx(1.0).epsilon(1e-8));
    RateEval re = rate_eval(law, t);
    CHECK(std::fabs(legendre(law, t) + re.h - t * re.h1) <= 1e-10);
    CHECK(re.h2 > 0.0);
    // the implicit scalar equation, for positive tilts
    if (t > 0.0)
      CHECK(std::fabs(h * std::exp(m * h) - std::exp(-m) * std::expm1(t)) <= 1e-10);
  }
}

TEST_CASE("rate-undefined outside the feasible tilt region") {
  // the feasibility of the tilt equation ends well past the negative-rate
  // window of this model; t = 3 is far outside it
  GaussSignLaw gs(0.5);
  CHECK_THROWS_AS(solve_h(gs, 3.0), Error);
  try {
    solve_h(gs, 3.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rate_undefined);
  }
  // superlinear intensity: the joint mgf diverges for every duration tilt
  PoissonEpochLaw quad(PiecewisePoly::parse("0:1,1"));
  CHECK_THROWS_AS(solve_h(quad, 0.5), Error);
}
