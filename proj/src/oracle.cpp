#include "ldp/oracle.hpp"

#include <cmath>

#include "ldp/quadrature.hpp"
#include "ldp/special.hpp"

namespace ldp {

namespace {

long long snapped_ceil(double q) {
  double r = std::round(q);
  if (std::fabs(q - r) < 1e-9) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(q));
}

}  // namespace

double unit_epoch_exact_tail(double c, double x) {
  long long m = snapped_ceil(c * x);
  if (m <= 0) return 1.0;
  auto f = [&](double u) { return std::exp(-u) * poisson_sf(m, x - u); };
  QuadratureOptions opt;
  opt.rel_tol = 1e-13;
  return integrate(f, 0.0, x, opt);
}

double unit_poisson_count_tail(double c, double x) {
  return poisson_sf(snapped_ceil(c * x), x);
}

}  // namespace ldp
