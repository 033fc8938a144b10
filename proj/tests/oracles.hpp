// Self-contained reference computations used to check the library: scalar
// bisection, composite Simpson quadrature, a Poisson tail series, and the
// closed forms of the worked models. Deliberately independent of the library
// code paths under test.
#pragma once

#include <cmath>
#include <functional>

namespace oracle {

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == (flo < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  double h = (b - a) / panels, acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f(a + i * h);
  }
  return acc * h / 3.0;
}

// Pr{Poisson(lam) >= m}, top-down series (requires m not far below lam).
inline double poisson_tail(long long m, double lam) {
  if (m <= 0) return 1.0;
  if (!(lam > 0.0)) return 0.0;
  if (static_cast<double>(m) > lam) {
    double term = std::exp(m * std::log(lam) - lam - std::lgamma(m + 1.0));
    double tot = 0.0, k = static_cast<double>(m);
    for (int it = 0; it < 100000; ++it) {
      tot += term;
      k += 1.0;
      term *= lam / k;
      if (term < tot * 1e-18) break;
    }
    return tot;
  }
  double term = std::exp(-lam), cdf = 0.0;
  for (long long k = 0; k < m; ++k) {
    if (k > 0) term *= lam / static_cast<double>(k);
    cdf += term;
  }
  return std::max(0.0, 1.0 - cdf);
}

// Pr{W(x) >= ceil(c x)} for the unit-intensity epoch model: the reward count
// is Poisson over the closed-epoch length, which is distributed as (x-X) v 0.
inline double unit_exact_tail(double c, double x) {
  double q = c * x;
  long long m = static_cast<long long>(std::fabs(q - std::round(q)) < 1e-9
                                           ? std::llround(q)
                                           : std::ceil(q));
  if (m <= 0) return 1.0;
  auto f = [&](double u) { return std::exp(-u) * poisson_tail(m, x - u); };
  return simpson(f, 0.0, x, 4000);
}

// s e^{Ms} = e^{-M}(e^t - 1), the implicit duration-threshold rate equation.
inline double threshold_rate_root(double m, double t) {
  double target = std::exp(-m) * std::expm1(t);
  return bisect([&](double s) { return s * std::exp(m * s) - target; }, 0.0, 20.0);
}

// Renewal density of Gamma(2,1) interarrivals.
inline double gamma21_density(double x) { return 0.5 * (1.0 - std::exp(-2.0 * x)); }

// Derivative check helper: central difference.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Frozen values computed with the routines above in long double before the
// build (see the matching checks in the tests).
inline constexpr double kThresholdRootM1T1 = 0.41670399881776591;
inline constexpr double kUnitExactX30T2 = 4.4846402180047552e-07;
inline constexpr double kUnitExactX20T12 = 0.15677262182624018;
inline constexpr double kUnitExactX80T2 = 1.1665503255039374e-15;
inline constexpr double kPoisTail1Ge2 = 0.26424111765711536;
inline constexpr double kPoisTail25Ge3 = 0.45618688411667048;

}  // namespace oracle
