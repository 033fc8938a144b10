#pragma once

#include <cmath>

namespace ldp {

inline double normal_pdf(double x) {
  return 0.3989422804014326779399460599344 * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048); }

inline double normal_sf(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244008443621048); }

/// log Pr{N(0,1) > x}, stable far into the right tail.
double normal_logsf(double x);

/// Inverse of normal_cdf on (0, 1); accurate to ~1e-15 after refinement.
double normal_quantile(double p);

/// Pr{Poisson(lambda) >= m} for integer m >= 0.
double poisson_sf(long long m, double lambda);

/// Antiderivative-based integrals of x^i e^{b x}, i in {0,1,2}.
/// Finite segment [a0, a1] (a1 may be +inf when b < 0); returns +inf when divergent.
double poly_exp_integral(int i, double b, double a0, double a1);

}  // namespace ldp
