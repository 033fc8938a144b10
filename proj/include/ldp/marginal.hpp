#pragma once

#include <cstdint>
#include <string>

#include "ldp/rng.hpp"

namespace ldp {

/// One-dimensional positive law with closed-form transforms: Erlang(shape, rate),
/// shape a positive integer (shape 1 = exponential). Exposes everything the
/// renewal and product-law machinery needs.
class Marginal {
public:
  Marginal(int shape, double rate);

  static Marginal exponential(double rate) { return Marginal(1, rate); }
  /// Parses "exp(r)" or "gamma(k,r)".
  static Marginal parse(const std::string& text);

  int shape() const { return shape_; }
  double rate() const { return rate_; }
  double mean() const { return shape_ / rate_; }

  /// E[xi^i e^{z xi}]; +inf for z >= rate.
  double exp_moment(int i, double z) const;
  double mgf(double z) const { return exp_moment(0, z); }

  double density(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  /// Exponentially weighted mass: int_(a,b] e^{z x} F(dx), requires z < rate.
  double tilted_mass(double z, double a, double b) const;

  double sample(SplitRng& rng) const;
  /// Draw from the e^{z xi}-tilted law (Erlang with rate - z).
  double sample_tilted(double z, SplitRng& rng) const;

  std::string describe() const;

private:
  int shape_;
  double rate_;
};

}  // namespace ldp
