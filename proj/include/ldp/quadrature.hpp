#pragma once

#include <functional>

namespace ldp {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_depth = 48;
};

/// Adaptive Gauss-Kronrod (7-15) on a finite interval.
/// Throws Error(Errc::quadrature) carrying the partial estimate when the
/// refinement budget is exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

/// Integral over [a, inf) of a function known to decay at least like
/// C e^{slope * x} with slope < 0 beyond some point: the domain is extended
/// by doubling until the analytic exponential remainder bound of the last
/// segment is below rel_tol of the running total.
double integrate_to_inf(const std::function<double(double)>& f, double a, double decay_slope,
                        const QuadratureOptions& opt = {});

}  // namespace ldp
