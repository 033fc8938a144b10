#include "ldp/rng.hpp"

namespace ldp {

namespace {

// Knuth's product method; valid for small means only.
uint64_t poisson_small(SplitRng& rng, double mean) {
  double limit = std::exp(-mean);
  double prod = rng.next_double();
  uint64_t k = 0;
  while (prod > limit) {
    prod *= rng.next_double();
    ++k;
  }
  return k;
}

// Hormann's PTRS transformed rejection, exact for mean >= 10.
uint64_t poisson_ptrs(SplitRng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = k * loglam - mean - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<uint64_t>(kf);
  }
}

}  // namespace

uint64_t SplitRng::next_poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  uint64_t total = 0;
  // Decompose very large means so the PTRS constants stay in range.
  while (mean > 1e7) {
    mean *= 0.5;
    total += poisson_ptrs(*this, mean);
  }
  return total + (mean < 10.0 ? poisson_small(*this, mean) : poisson_ptrs(*this, mean));
}

}  // namespace ldp
