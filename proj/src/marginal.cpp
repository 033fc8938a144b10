#include "ldp/marginal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ldp/errors.hpp"

namespace ldp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Marginal::Marginal(int shape, double rate) : shape_(shape), rate_(rate) {
  if (shape < 1 || shape > 64) throw Error(Errc::config, "marginal shape must be in 1..64");
  if (!(rate > 0.0)) throw Error(Errc::config, "marginal rate must be positive");
}

Marginal Marginal::parse(const std::string& text) {
  auto lp = text.find('(');
  auto rp = text.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw Error(Errc::config, "cannot parse marginal law: " + text);
  std::string name = text.substr(0, lp);
  std::string args = text.substr(lp + 1, rp - lp - 1);
  if (name == "exp") return Marginal(1, std::stod(args));
  if (name == "gamma") {
    auto comma = args.find(',');
    if (comma == std::string::npos)
      throw Error(Errc::config, "gamma law needs (shape,rate): " + text);
    double kd = std::stod(args.substr(0, comma));
    int k = static_cast<int>(std::lround(kd));
    if (std::fabs(kd - k) > 1e-9)
      throw Error(Errc::config, "gamma shape must be an integer: " + text);
    return Marginal(k, std::stod(args.substr(comma + 1)));
  }
  throw Error(Errc::config, "unknown marginal law: " + name);
}

double Marginal::exp_moment(int i, double z) const {
  if (z >= rate_) return kInf;
  double r = rate_ - z;
  double m = std::pow(rate_ / r, shape_);
  switch (i) {
    case 0: return m;
    case 1: return m * shape_ / r;
    case 2: return m * shape_ * (shape_ + 1.0) / (r * r);
    default: throw Error(Errc::domain, "exp_moment order must be 0..2");
  }
}

double Marginal::density(double x) const {
  if (x < 0.0) return 0.0;
  if (shape_ == 1) return rate_ * std::exp(-rate_ * x);
  return std::exp(shape_ * std::log(rate_) + (shape_ - 1) * std::log(x) - rate_ * x -
                  std::lgamma(static_cast<double>(shape_)));
}

double Marginal::survival(double x) const {
  if (x <= 0.0) return 1.0;
  double lx = rate_ * x;
  double term = std::exp(-lx);
  double total = 0.0;
  for (int j = 0; j < shape_; ++j) {
    total += term;
    term *= lx / (j + 1);
  }
  return total;
}

double Marginal::cdf(double x) const { return 1.0 - survival(x); }

double Marginal::tilted_mass(double z, double a, double b) const {
  if (z >= rate_) throw Error(Errc::domain, "tilt exceeds marginal rate");
  Marginal tilted(shape_, rate_ - z);
  return mgf(z) * (tilted.cdf(b) - tilted.cdf(a));
}

double Marginal::sample(SplitRng& rng) const {
  double s = 0.0;
  for (int j = 0; j < shape_; ++j) s += rng.next_exponential();
  return s / rate_;
}

double Marginal::sample_tilted(double z, SplitRng& rng) const {
  if (z >= rate_) throw Error(Errc::unsupported_tilt, "tilt exceeds marginal rate");
  double s = 0.0;
  for (int j = 0; j < shape_; ++j) s += rng.next_exponential();
  return s / (rate_ - z);
}

std::string Marginal::describe() const {
  std::ostringstream os;
  if (shape_ == 1)
    os << "exp(" << rate_ << ")";
  else
    os << "gamma(" << shape_ << "," << rate_ << ")";
  return os.str();
}

}  // namespace ldp
