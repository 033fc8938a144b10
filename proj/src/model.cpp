#include "ldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldp/errors.hpp"
#include "ldp/quadrature.hpp"
#include "ldp/special.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int i) {
  double p = 1.0;
  for (int k = 0; k < i; ++k) p *= x;
  return p;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewisePoly

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coeffs)
    : breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
  if (breaks_.empty() || breaks_.front() != 0.0)
    throw Error(Errc::config, "intensity pieces must start at 0");
  if (breaks_.size() != coeffs_.size())
    throw Error(Errc::config, "intensity: one coefficient list per piece");
  for (size_t k = 1; k < breaks_.size(); ++k)
    if (!(breaks_[k] > breaks_[k - 1]))
      throw Error(Errc::config, "intensity breakpoints must increase");
  for (const auto& c : coeffs_)
    if (c.empty()) throw Error(Errc::config, "intensity piece without coefficients");
  // Nonnegativity spot-check on each piece.
  for (size_t k = 0; k < breaks_.size(); ++k) {
    double lo = breaks_[k];
    double hi = (k + 1 < breaks_.size()) ? breaks_[k + 1] : lo + 10.0;
    for (int g = 0; g <= 32; ++g) {
      double x = lo + (hi - lo) * g / 32.0;
      if (eval(x) < -1e-12) throw Error(Errc::config, "intensity must be nonnegative");
    }
  }
  cum_.resize(breaks_.size(), 0.0);
  for (size_t k = 1; k < breaks_.size(); ++k) {
    double len = breaks_[k] - breaks_[k - 1];
    double inc = 0.0;
    for (size_t i = 0; i < coeffs_[k - 1].size(); ++i)
      inc += coeffs_[k - 1][i] * std::pow(len, static_cast<double>(i + 1)) / (i + 1);
    cum_[k] = cum_[k - 1] + inc;
  }
}

PiecewisePoly PiecewisePoly::parse(const std::string& text) {
  std::vector<double> breaks;
  std::vector<std::vector<double>> coeffs;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, '|')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    auto colon = piece.find(':');
    if (colon == std::string::npos)
      throw Error(Errc::config, "intensity piece needs start:coeffs, got: " + piece);
    breaks.push_back(std::stod(piece.substr(0, colon)));
    std::vector<double> c;
    std::stringstream cs(piece.substr(colon + 1));
    std::string tok;
    while (std::getline(cs, tok, ',')) c.push_back(std::stod(trim(tok)));
    coeffs.push_back(std::move(c));
  }
  return PiecewisePoly(std::move(breaks), std::move(coeffs));
}

double PiecewisePoly::eval(double x) const {
  if (x < 0.0) return 0.0;
  size_t k = std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
  k = (k == 0) ? 0 : k - 1;
  double u = x - breaks_[k];
  const auto& c = coeffs_[k];
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * u + c[i];
  return v;
}

double PiecewisePoly::integral(double x) const {
  if (x <= 0.0) return 0.0;
  size_t k = std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
  k = (k == 0) ? 0 : k - 1;
  double u = x - breaks_[k];
  const auto& c = coeffs_[k];
  double inc = 0.0;
  for (size_t i = c.size(); i-- > 0;) inc = inc * u + c[i] / (i + 1);
  return cum_[k] + inc * u;
}

double PiecewisePoly::asymptotic_rate() const {
  const auto& c = coeffs_.back();
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0.0) return kInf;
  return c[0];
}

bool PiecewisePoly::piecewise_constant() const {
  for (const auto& c : coeffs_)
    for (size_t i = 1; i < c.size(); ++i)
      if (c[i] != 0.0) return false;
  return true;
}

std::string PiecewisePoly::describe() const {
  std::ostringstream os;
  for (size_t k = 0; k < breaks_.size(); ++k) {
    if (k) os << " | ";
    os << breaks_[k] << ":";
    for (size_t i = 0; i < coeffs_[k].size(); ++i) {
      if (i) os << ",";
      os << coeffs_[k][i];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JointLaw base

double JointLaw::tilted_moment(double t, double s, int i, int j) const {
  if (i < 0 || j < 0 || i > 2 || j > 2 || i + j > 2)
    throw Error(Errc::domain, "tilted_moment orders must satisfy i,j in {0,1,2}, i+j <= 2");
  if (i == 0 && j == 0) return mgf_joint(t, s);
  return tilted_moment_impl(t, s, i, j);
}

double JointLaw::weighted_x_mass(double t, double w, double a, double b) const {
  auto f = [&](double u) { return conditional_mgf(t, u) * std::exp(-w * u) * x_density(u); };
  return integrate(f, a, b);
}

double JointLaw::y_mgf_tail(double t, double x) const {
  double slope = upper_log_slope(t, 0.0);
  if (slope >= 0.0) return kInf;
  auto f = [&](double u) { return conditional_mgf(t, u) * x_density(u); };
  double start = std::max(x, 1.0 + (std::isinf(slope) ? 0.0 : 2.0 / -slope));
  double total = start > x ? integrate(f, x, start) : 0.0;
  return total + integrate_to_inf(f, start, std::isinf(slope) ? -1.0 : slope);
}

double JointLaw::x_lower_cutoff(double /*p*/) const { return 0.0; }

double JointLaw::mgf_joint_quadrature(double t, double s) const {
  return tilted_moment_quadrature(t, s, 0, 0);
}

double JointLaw::tilted_moment_quadrature(double t, double s, int i, int j) const {
  if (i < 0 || j < 0 || i > 2 || j > 2 || i + j > 2)
    throw Error(Errc::domain, "orders must satisfy i,j in {0,1,2}, i+j <= 2");
  double slope = upper_log_slope(t, s);
  if (slope >= 0.0) return kInf;
  const bool superexp = std::isinf(slope);

  auto f = [&](double x) {
    return ipow(x, i) * conditional_moment(t, x, j) * std::exp(s * x) * x_density(x);
  };

  double total = 0.0;
  double lo_edge = 0.0;
  if (!x_nonneg()) {
    // Mirrored lower tail; the Gaussian-type decay dominates any polynomial.
    double start_low = std::fabs(s) + 6.0 + i;
    auto fm = [&](double u) { return f(-u); };
    total += integrate_to_inf(fm, start_low, -1.0);
    lo_edge = -start_low;
  }

  // Tail start: far enough out that slope + poly-degree/start stays negative.
  int degree = i + 2 * j + 2;
  double start = upper_tail_start(t, s);
  double slope_eff;
  if (superexp) {
    slope_eff = -1.0;
  } else {
    start = std::max(start, (degree + 1.0) / -slope);
    slope_eff = slope + degree / start;
  }

  double prev = lo_edge;
  for (double b : x_breakpoints()) {
    if (b > prev && b < start) {
      total += integrate(f, prev, b);
      prev = b;
    }
  }
  if (start > prev) total += integrate(f, prev, start);
  total += integrate_to_inf(f, start, slope_eff);
  return total;
}

double JointLaw::upper_tail_start(double /*t*/, double /*s*/) const {
  auto br = x_breakpoints();
  return br.empty() ? 1.0 : br.back() + 1.0;
}

// ---------------------------------------------------------------------------
// PoissonEpochLaw

PoissonEpochLaw::PoissonEpochLaw(PiecewisePoly f, bool unit_variant)
    : f_(std::move(f)), unit_(unit_variant) {
  kind_ = unit_ ? "poisson-epoch-unit" : "poisson-epoch";
  x_nonneg_ = true;
  y_span_ = 1.0;
  beta_x_ = -1.0;
  t_range_ = {-20.0, 20.0};
  y_mgf_everywhere_ = false;
  scale_hint_ = 1.0;
}

std::string PoissonEpochLaw::describe() const {
  if (unit_) return kind_;
  return kind_ + "(f = " + f_.describe() + ")";
}

std::optional<double> PoissonEpochLaw::closed_form_rate(double t) const {
  if (unit_) return std::expm1(t);
  return std::nullopt;
}

double PoissonEpochLaw::mgf_joint(double t, double s) const {
  double w = std::expm1(t);
  if (unit_) {
    double denom = 1.0 - s - w;
    return denom > 0.0 ? 1.0 / denom : kInf;
  }
  if (f_.piecewise_constant()) return mgf_joint_step_analytic(t, s);
  return tilted_moment_quadrature(t, s, 0, 0);
}

double PoissonEpochLaw::mgf_joint_step_analytic(double t, double s) const {
  // Piecewise-constant intensity: the integrand is exponential on each piece.
  double w = std::expm1(t);
  const auto& br = f_.breaks();
  double total = 0.0;
  for (size_t k = 0; k < br.size(); ++k) {
    double lo = br[k];
    double hi = (k + 1 < br.size()) ? br[k + 1] : kInf;
    double nu = f_.eval(lo);
    double offset = w * f_.integral(lo) + (s - 1.0) * lo;
    double rate = w * nu + s - 1.0;
    double seg = poly_exp_integral(0, rate, 0.0, std::isinf(hi) ? kInf : hi - lo);
    if (std::isinf(seg)) return kInf;
    total += std::exp(offset) * seg;
  }
  return total;
}

double PoissonEpochLaw::conditional_moment(double t, double x, int j) const {
  if (x < 0.0) throw Error(Errc::domain, "conditional moment outside the duration support");
  double lam = f_.integral(x);
  double g = std::exp(lam * std::expm1(t));
  if (j == 0) return g;
  double le = lam * std::exp(t);
  if (j == 1) return le * g;
  return (le + le * le) * g;
}

double PoissonEpochLaw::tail_x(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x); }

double PoissonEpochLaw::x_density(double x) const { return x < 0.0 ? 0.0 : std::exp(-x); }

double PoissonEpochLaw::tilted_moment_impl(double t, double s, int i, int j) const {
  double w = std::expm1(t);
  if (unit_) {
    double a = w + s - 1.0;
    if (a >= 0.0) return kInf;
    double et = std::exp(t);
    auto gi = [&](int n) {  // int_0^inf x^n e^{a x} dx = n! / (-a)^{n+1}
      double r = 1.0;
      for (int q = 1; q <= n; ++q) r *= q;
      return r / std::pow(-a, n + 1);
    };
    if (j == 0) return gi(i);
    if (j == 1) return et * gi(i + 1);
    return et * gi(i + 1) + et * et * gi(i + 2);
  }
  return tilted_moment_quadrature(t, s, i, j);
}

std::vector<double> PoissonEpochLaw::x_breakpoints() const {
  std::vector<double> br(f_.breaks().begin(), f_.breaks().end());
  return br;
}

double PoissonEpochLaw::upper_log_slope(double t, double s) const {
  double w = std::expm1(t);
  double nu = f_.asymptotic_rate();
  if (std::isinf(nu)) {
    if (w > 0.0) return kInf;
    if (w == 0.0) return s - 1.0;
    return -kInf;  // superexponential decay
  }
  return nu * w + s - 1.0;
}

double PoissonEpochLaw::upper_tail_start(double t, double s) const {
  double base = JointLaw::upper_tail_start(t, s);
  double w = std::expm1(t);
  if (!(w < 0.0) || !std::isinf(f_.asymptotic_rate())) return base;
  // Superlinear integral with a negative weight: walk out until the local
  // exponent slope is safely below -1.
  double x = std::max(base, 1.0);
  for (int it = 0; it < 60; ++it) {
    if (f_.eval(x) * w + s - 1.0 <= -1.0 && f_.eval(2.0 * x) * w + s - 1.0 <= -1.0) return x;
    x *= 2.0;
  }
  throw Error(Errc::quadrature, "cannot locate a decaying tail for the intensity", x, 0.0);
}

double PoissonEpochLaw::weighted_x_mass(double t, double w, double a, double b) const {
  double wt = std::expm1(t);
  if (unit_) return poly_exp_integral(0, wt - w - 1.0, a, b);
  auto f = [&](double u) { return std::exp(f_.integral(u) * wt - w * u - u); };
  return integrate(f, a, b);
}

double PoissonEpochLaw::y_mgf_tail(double t, double x) const {
  double w = std::expm1(t);
  double lo = std::max(x, 0.0);
  if (unit_) {
    double rate = w - 1.0;
    return rate < 0.0 ? std::exp(rate * lo) / -rate : kInf;
  }
  return JointLaw::y_mgf_tail(t, lo);
}

Sample PoissonEpochLaw::sample(SplitRng& rng) const {
  double x = rng.next_exponential();
  double y = static_cast<double>(rng.next_poisson(f_.integral(x)));
  return {x, y};
}

double PoissonEpochLaw::tilt_log_bound(double t, double h) const {
  // Envelope exponent of the tilted duration density against its proposal:
  //   finite nu:   alpha(x) = (F(x) - nu x) w   against Exp(1 + h - nu w)
  //   nu infinite: alpha(x) = F(x) w - h x      against the base Exp(1),
  //                bounded only when w < 0.
  // The supremum is located by per-piece grids with local refinement; on the
  // last piece alpha is constant (finite nu) or decays (infinite nu, w < 0).
  double w = std::expm1(t);
  double nu = f_.asymptotic_rate();
  const bool nu_finite = std::isfinite(nu);
  if (!nu_finite && w > 0.0)
    throw Error(Errc::unsupported_tilt, "tilt weight unbounded for " + kind_);
  auto alpha = [&](double x) {
    return nu_finite ? (f_.integral(x) - nu * x) * w : f_.integral(x) * w - h * x;
  };
  double horizon;
  if (nu_finite) {
    horizon = f_.breaks().back();
  } else {
    horizon = f_.breaks().back() + 1.0;
    while (alpha(2.0 * horizon) > alpha(horizon) - 50.0) {
      horizon *= 2.0;
      if (horizon > 1e12)
        throw Error(Errc::unsupported_tilt, "tilt weight unbounded for " + kind_);
    }
    horizon *= 2.0;
  }
  double best = alpha(0.0);
  double bestx = 0.0;
  const auto& br = f_.breaks();
  for (size_t k = 0; k < br.size(); ++k) {
    double lo = br[k];
    double hi = (k + 1 < br.size()) ? br[k + 1] : std::max(horizon, lo);
    if (!(hi > lo)) {
      if (alpha(lo) > best) { best = alpha(lo); bestx = lo; }
      continue;
    }
    for (int g = 0; g <= 256; ++g) {
      double x = lo + (hi - lo) * g / 256.0;
      double v = alpha(x);
      if (v > best) { best = v; bestx = x; }
    }
  }
  // Local ternary refinement around the best grid point.
  double span = std::max(horizon, 1.0) / 128.0;
  double lo = std::max(0.0, bestx - span), hi = bestx + span;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (alpha(m1) < alpha(m2)) lo = m1; else hi = m2;
  }
  best = std::max(best, alpha(0.5 * (lo + hi)));
  return best + 1e-9;  // keep the envelope an upper bound
}

Sample PoissonEpochLaw::sample_tilted(double t, double h, SplitRng& rng) const {
  double et = std::exp(t);
  double w = std::expm1(t);
  if (unit_) {
    double rate = 1.0 + h - w;
    if (!(rate > 1e-12))
      throw Error(Errc::unsupported_tilt, "tilted duration rate nonpositive for " + kind_);
    double x = rng.next_exponential() / rate;
    return {x, static_cast<double>(rng.next_poisson(x * et))};
  }
  double nu = f_.asymptotic_rate();
  // The envelope depends only on (law, t, h); sampling loops reuse it.
  struct EnvelopeCache {
    const void* law = nullptr;
    double t = 0.0, h = 0.0, bound = 0.0;
  };
  static thread_local EnvelopeCache cache;
  if (cache.law != this || cache.t != t || cache.h != h) {
    cache = {this, t, h, tilt_log_bound(t, h)};
  }
  const double bound = cache.bound;
  double proposal_rate = 1.0;
  if (std::isfinite(nu)) {
    // The tilted density behaves like e^{-(1 + h - nu w) x}; reject against
    // that exponential so the weight stays bounded at every feasible tilt.
    proposal_rate = 1.0 + h - nu * w;
    if (!(proposal_rate > 1e-12))
      throw Error(Errc::unsupported_tilt, "tilted duration rate nonpositive for " + kind_);
  }
  for (long long it = 0; it < 10'000'000; ++it) {
    double x = rng.next_exponential() / proposal_rate;
    double lw = std::isfinite(nu) ? (f_.integral(x) - nu * x) * w
                                  : f_.integral(x) * w - h * x;
    if (std::log(rng.next_double_pos()) < lw - bound)
      return {x, static_cast<double>(rng.next_poisson(f_.integral(x) * et))};
  }
  throw Error(Errc::unsupported_tilt, "acceptance-rejection stalled for " + kind_);
}

// ---------------------------------------------------------------------------
// ThresholdLaw

ThresholdLaw::ThresholdLaw(double m) : m_(m) {
  if (!(m > 0.0)) throw Error(Errc::config, "threshold M must be positive");
  kind_ = "threshold";
  x_nonneg_ = true;
  y_span_ = 1.0;
  beta_x_ = -1.0;
  t_range_ = {-30.0, 30.0};
  y_mgf_everywhere_ = true;
  scale_hint_ = 1.0;
}

std::string ThresholdLaw::describe() const {
  std::ostringstream os;
  os << kind_ << "(M = " << m_ << ")";
  return os.str();
}

double ThresholdLaw::mgf_joint(double t, double s) const {
  double b = s - 1.0;
  double hi = poly_exp_integral(0, b, m_, kInf);
  if (std::isinf(hi)) return kInf;
  return poly_exp_integral(0, b, 0.0, m_) + std::exp(t) * hi;
}

double ThresholdLaw::tilted_moment_impl(double t, double s, int i, int j) const {
  double b = s - 1.0;
  double hi = poly_exp_integral(i, b, m_, kInf);
  if (std::isinf(hi)) return kInf;
  double high_leg = std::exp(t) * hi;
  if (j >= 1) return high_leg;  // Y is an indicator, so Y^j = Y
  return poly_exp_integral(i, b, 0.0, m_) + high_leg;
}

double ThresholdLaw::conditional_moment(double t, double x, int j) const {
  if (x < 0.0) throw Error(Errc::domain, "conditional moment outside the duration support");
  double y = x > m_ ? 1.0 : 0.0;
  double g = std::exp(t * y);
  return j == 0 ? g : y * g;
}

double ThresholdLaw::tail_x(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x); }

double ThresholdLaw::x_density(double x) const { return x < 0.0 ? 0.0 : std::exp(-x); }

std::vector<double> ThresholdLaw::x_breakpoints() const { return {m_}; }

double ThresholdLaw::upper_log_slope(double /*t*/, double s) const { return s - 1.0; }

double ThresholdLaw::weighted_x_mass(double t, double w, double a, double b) const {
  double rate = -w - 1.0;
  double lo_part = 0.0, hi_part = 0.0;
  if (a < m_) lo_part = poly_exp_integral(0, rate, a, std::min(b, m_));
  if (b > m_) hi_part = std::exp(t) * poly_exp_integral(0, rate, std::max(a, m_), b);
  return lo_part + hi_part;
}

double ThresholdLaw::y_mgf_tail(double t, double x) const {
  double et = std::exp(t);
  if (x >= m_) return et * std::exp(-x);
  double lo = std::max(x, 0.0);
  return (std::exp(-lo) - std::exp(-m_)) + et * std::exp(-m_);
}

Sample ThresholdLaw::sample(SplitRng& rng) const {
  double x = rng.next_exponential();
  return {x, x > m_ ? 1.0 : 0.0};
}

Sample ThresholdLaw::sample_tilted(double t, double h, SplitRng& rng) const {
  double r = 1.0 + h;
  if (!(r > 1e-12))
    throw Error(Errc::unsupported_tilt, "tilted duration rate nonpositive for " + kind_);
  // Two-piece exponential density: e^{-r x} below M, e^{t} e^{-r x} above.
  double w_lo = -std::expm1(-r * m_) / r;
  double w_hi = std::exp(t) * std::exp(-r * m_) / r;
  double x;
  if (rng.next_double() * (w_lo + w_hi) < w_lo) {
    double v = rng.next_double();
    x = -std::log1p(v * std::expm1(-r * m_)) / r;
  } else {
    x = m_ + rng.next_exponential() / r;
  }
  return {x, x > m_ ? 1.0 : 0.0};
}

// ---------------------------------------------------------------------------
// GaussSignLaw

GaussSignLaw::GaussSignLaw(double a) : a_(a) {
  if (!(a > 0.0)) throw Error(Errc::config, "gauss-sign a must be positive");
  kind_ = "gauss-sign";
  x_nonneg_ = false;
  y_span_ = 1.0;
  beta_x_ = -kInf;
  double tstar = std::log(normal_cdf(a) / normal_sf(a));
  t_range_ = {0.0, tstar};
  y_mgf_everywhere_ = true;
  scale_hint_ = 1.0;
}

std::string GaussSignLaw::describe() const {
  std::ostringstream os;
  os << kind_ << "(a = " << a_ << ")";
  return os.str();
}

namespace {
double log_add_exp(double x, double y) {
  if (std::isinf(x) && x < 0.0) return y;
  if (std::isinf(y) && y < 0.0) return x;
  double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::fabs(x - y)));
}
}  // namespace

double GaussSignLaw::mgf_joint(double t, double s) const {
  // E[e^{tY+sX}] = e^{s^2/2} [ e^t Phi_bar(a-s) + e^{-t} Phi(a-s) ], in log space.
  double c = a_ - s;
  double lp = t + 0.5 * s * s + normal_logsf(c);
  double lm = -t + 0.5 * s * s + normal_logsf(-c);
  return std::exp(log_add_exp(lp, lm));
}

double GaussSignLaw::tilted_moment_impl(double t, double s, int i, int j) const {
  if (0.5 * s * s > 700.0) {
    if (j % 2 == 0) return kInf;
    return s > 0.0 ? kInf : -kInf;
  }
  double scale = std::exp(0.5 * s * s);
  double c = a_ - s;
  double sf = normal_sf(c), pdf = normal_pdf(c);
  double gp;  // int_a^inf x^i e^{s x} phi(x) dx / scale
  switch (i) {
    case 0: gp = sf; break;
    case 1: gp = pdf + s * sf; break;
    default: gp = (sf + c * pdf) + 2.0 * s * pdf + s * s * sf;
  }
  double full;
  switch (i) {
    case 0: full = 1.0; break;
    case 1: full = s; break;
    default: full = 1.0 + s * s;
  }
  double gm = full - gp;
  double et = std::exp(t), emt = std::exp(-t);
  double v = (j % 2 == 1) ? (et * gp - emt * gm) : (et * gp + emt * gm);
  return scale * v;
}

double GaussSignLaw::conditional_moment(double t, double x, int j) const {
  double y = x >= a_ ? 1.0 : -1.0;
  double g = std::exp(t * y);
  return j == 1 ? y * g : g;
}

double GaussSignLaw::tail_x(double x) const { return normal_sf(x); }

double GaussSignLaw::x_density(double x) const { return normal_pdf(x); }

std::vector<double> GaussSignLaw::x_breakpoints() const { return {a_}; }

double GaussSignLaw::upper_log_slope(double /*t*/, double /*s*/) const { return -kInf; }

double GaussSignLaw::upper_tail_start(double /*t*/, double s) const {
  return std::max(a_ + 1.0, std::fabs(s) + 6.0);
}

double GaussSignLaw::weighted_x_mass(double t, double w, double lo, double hi) const {
  // int e^{t y(u)} e^{-w u} phi(u) du over (lo, hi], split at a.
  double scale = std::exp(0.5 * w * w);
  auto seg = [&](double l, double h) { return normal_cdf(h + w) - normal_cdf(l + w); };
  double total = 0.0;
  if (lo < a_) total += std::exp(-t) * scale * seg(lo, std::min(hi, a_));
  if (hi > a_) total += std::exp(t) * scale * seg(std::max(lo, a_), hi);
  return total;
}

double GaussSignLaw::y_mgf_tail(double t, double x) const {
  double et = std::exp(t), emt = std::exp(-t);
  if (x >= a_) return et * normal_sf(x);
  return et * normal_sf(a_) + emt * (normal_cdf(a_) - normal_cdf(x));
}

double GaussSignLaw::x_lower_cutoff(double p) const { return normal_quantile(p); }

Sample GaussSignLaw::sample(SplitRng& rng) const {
  double x = rng.next_normal();
  return {x, x >= a_ ? 1.0 : -1.0};
}

Sample GaussSignLaw::sample_tilted(double t, double h, SplitRng& rng) const {
  // Tilted duration is N(-h, 1) split at a with exponentially reweighted legs.
  double c = a_ + h;
  double w_hi = std::exp(t) * normal_sf(c);
  double w_lo = std::exp(-t) * normal_cdf(c);
  double x;
  if (rng.next_double() * (w_hi + w_lo) < w_hi) {
    double v = rng.next_double_pos() * normal_sf(c);
    x = -h - normal_quantile(v);
  } else {
    double v = rng.next_double_pos() * normal_cdf(c);
    x = -h + normal_quantile(v);
  }
  double y = x >= a_ ? 1.0 : -1.0;
  return {x, y};
}

// ---------------------------------------------------------------------------
// ProductLaw

ProductLaw::ProductLaw(Marginal law_x, Marginal law_y) : x_(law_x), y_(law_y) {
  kind_ = "independent-product";
  x_nonneg_ = true;
  y_span_ = std::nullopt;
  beta_x_ = -x_.rate();
  t_range_ = {-30.0, y_.rate()};
  y_mgf_everywhere_ = false;
  scale_hint_ = 1.0;
}

std::string ProductLaw::describe() const {
  return kind_ + "(x = " + x_.describe() + ", y = " + y_.describe() + ")";
}

std::optional<double> ProductLaw::closed_form_rate(double t) const {
  double my = y_.mgf(t);
  if (std::isinf(my)) return std::nullopt;
  // mgf_x(-h) = 1 / mgf_y(t) solved in closed form for Erlang durations.
  return x_.rate() * (std::pow(my, 1.0 / x_.shape()) - 1.0);
}

double ProductLaw::mgf_joint(double t, double s) const {
  double a = y_.mgf(t), b = x_.mgf(s);
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return a * b;
}

double ProductLaw::tilted_moment_impl(double t, double s, int i, int j) const {
  double a = y_.exp_moment(j, t), b = x_.exp_moment(i, s);
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return a * b;
}

double ProductLaw::conditional_moment(double t, double x, int j) const {
  if (x < 0.0) throw Error(Errc::domain, "conditional moment outside the duration support");
  return y_.exp_moment(j, t);
}

double ProductLaw::tail_x(double x) const { return x_.survival(x); }

double ProductLaw::x_density(double x) const { return x_.density(x); }

double ProductLaw::upper_log_slope(double /*t*/, double s) const { return s - x_.rate(); }

double ProductLaw::weighted_x_mass(double t, double w, double a, double b) const {
  double my = y_.mgf(t);
  if (std::isinf(my)) return kInf;
  return my * x_.tilted_mass(-w, a, b);
}

double ProductLaw::y_mgf_tail(double t, double x) const {
  double my = y_.mgf(t);
  if (std::isinf(my)) return kInf;
  return my * x_.survival(std::max(x, 0.0));
}

Sample ProductLaw::sample(SplitRng& rng) const { return {x_.sample(rng), y_.sample(rng)}; }

Sample ProductLaw::sample_tilted(double t, double h, SplitRng& rng) const {
  if (t >= y_.rate() || -h >= x_.rate())
    throw Error(Errc::unsupported_tilt, "tilt outside the Erlang domain for " + kind_);
  return {x_.sample_tilted(-h, rng), y_.sample_tilted(t, rng)};
}

// ---------------------------------------------------------------------------
// Model factory

std::unique_ptr<JointLaw> make_model(const std::map<std::string, std::string>& kv) {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"poisson-epoch", {"f"}},
      {"poisson-epoch-unit", {}},
      {"threshold", {"M"}},
      {"gauss-sign", {"a"}},
      {"independent-product", {"x", "y"}},
  };
  auto it = kv.find("model");
  if (it == kv.end()) throw Error(Errc::config, "model spec needs a 'model' key");
  const std::string& name = it->second;
  auto al = allowed.find(name);
  if (al == allowed.end()) throw Error(Errc::config, "unknown model: " + name);
  for (const auto& [k, v] : kv) {
    if (k == "model") continue;
    if (std::find(al->second.begin(), al->second.end(), k) == al->second.end())
      throw Error(Errc::config, "unknown key '" + k + "' for model " + name);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto f = kv.find(key);
    if (f == kv.end()) throw Error(Errc::config, "model " + name + " needs key '" + key + "'");
    return f->second;
  };
  if (name == "poisson-epoch")
    return std::make_unique<PoissonEpochLaw>(PiecewisePoly::parse(need("f")));
  if (name == "poisson-epoch-unit")
    return std::make_unique<PoissonEpochLaw>(PiecewisePoly::parse("0:1"), true);
  if (name == "threshold") return std::make_unique<ThresholdLaw>(std::stod(need("M")));
  if (name == "gauss-sign") return std::make_unique<GaussSignLaw>(std::stod(need("a")));
  return std::make_unique<ProductLaw>(Marginal::parse(need("x")), Marginal::parse(need("y")));
}

std::unique_ptr<JointLaw> parse_model_spec(const std::string& spec_or_path) {
  std::string text = spec_or_path;
  std::ifstream in(spec_or_path);
  if (in.good()) {
    std::ostringstream buf;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (!first) buf << ";";
      buf << line;
      first = false;
    }
    text = buf.str();
  }
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      // Bare model name shorthand.
      if (kv.count("model")) throw Error(Errc::config, "cannot parse model entry: " + item);
      kv["model"] = item;
      continue;
    }
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return make_model(kv);
}

}  // namespace ldp
