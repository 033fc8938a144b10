#include "ldp/rate.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "ldp/errors.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// E[e^{tY - sigma X}] with +inf treated as "above 1" by the callers and
// quadrature failures during exploratory probing reported as NaN.
double tilt_probe(const JointLaw& law, double t, double sigma) {
  try {
    return law.mgf_joint(t, -sigma);
  } catch (const Error& e) {
    if (e.code() == Errc::quadrature) return kNan;
    throw;
  }
}

// Newton slope -E[X e^{tY - sigma X}]; NaN demotes the step to bisection.
double tilt_slope_probe(const JointLaw& law, double t, double sigma) {
  try {
    return -law.tilted_moment(t, -sigma, 1, 0);
  } catch (const Error& e) {
    if (e.code() == Errc::quadrature) return kNan;
    throw;
  }
}

}  // namespace

double solve_h(const JointLaw& law, double t, const SolverConfig& cfg) {
  if (t == 0.0) return 0.0;  // E[e^{-sX}] = 1 exactly at s = 0

  const double scale = law.scale_hint();
  auto u = [&](double sigma) { return tilt_probe(law, t, sigma); };

  // Locate a point strictly below 1. sigma = 0 probes E[e^{tY}] (inside the
  // feasible set whenever the Y-tilt alone is contracting); an expanding
  // symmetric grid covers the rest.
  double sigma_in = kInf;
  bool any_finite = false;
  {
    double best_v = kInf;
    double step = scale;
    {
      double v0 = u(0.0);
      if (std::isfinite(v0)) any_finite = true;
      if (!std::isnan(v0)) best_v = v0;
      if (v0 < 1.0 - 1e-15) sigma_in = 0.0;
    }
    for (int k = 0; k < 60 && std::isinf(sigma_in); ++k) {
      for (double cand : {step, -step, 0.5 * step, -0.5 * step}) {
        double v = u(cand);
        if (std::isnan(v)) continue;  // unevaluable probe, try elsewhere
        if (std::isfinite(v)) any_finite = true;
        if (v < best_v) best_v = v;
        if (v < 1.0 - 1e-15) {
          sigma_in = cand;
          break;
        }
      }
      step *= cfg.bracket_expand;
    }
    if (std::isinf(sigma_in)) {
      if (!any_finite)
        throw Error(Errc::domain, "tilted expectation diverges everywhere for " + law.kind());
      std::ostringstream os;
      os << "no tilt root: inf_s E[e^{tY-sX}] >= 1 at t = " << t << " for " << law.kind();
      throw Error(Errc::rate_undefined, os.str(), t, best_v);
    }
  }

  // Walk the lower bracket edge out until the value exceeds 1.
  double lo = sigma_in, hi = sigma_in;
  {
    double step = scale;
    bool found = false;
    for (int k = 0; k < 60; ++k) {
      double cand = sigma_in - step;
      double v = u(cand);
      if (v > 1.0) {  // NaN probes fail this comparison and expand further
        lo = cand;
        found = true;
        break;
      }
      if (v < u(hi)) hi = cand;
      step *= cfg.bracket_expand;
    }
    if (!found)
      throw Error(Errc::rate_undefined,
                  "no bracket below the tilt root within the expansion budget for " + law.kind(),
                  t, 0.0);
  }

  // Safeguarded Newton on the decreasing branch; bisection fallback.
  double sigma = 0.5 * (lo + hi);
  double v = u(sigma);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (std::isfinite(v)) {
      if (v > 1.0) lo = sigma; else hi = sigma;
    } else {
      lo = sigma;
    }
    double next = kInf;
    if (std::isfinite(v)) {
      double deriv = tilt_slope_probe(law, t, sigma);  // du/dsigma
      if (std::isfinite(deriv) && deriv < 0.0) {
        double cand = sigma - (v - 1.0) / deriv;
        if (cand > lo && cand < hi) next = cand;
      }
    }
    if (std::isinf(next)) next = 0.5 * (lo + hi);
    double vn = u(next);
    sigma = next;
    v = vn;
    if (std::isfinite(v) && std::fabs(v - 1.0) <= cfg.tol_root) {
      // Polish while it still improves the residual.
      for (int p = 0; p < 8; ++p) {
        double deriv = tilt_slope_probe(law, t, sigma);
        if (!std::isfinite(deriv) || deriv >= 0.0) break;
        double cand = sigma - (v - 1.0) / deriv;
        double vc = u(cand);
        if (!std::isfinite(vc) || std::fabs(vc - 1.0) >= std::fabs(v - 1.0)) break;
        sigma = cand;
        v = vc;
      }
      break;
    }
  }
  if (!(std::fabs(v - 1.0) <= cfg.tol_root))
    throw Error(Errc::rate_undefined, "tilt root iteration did not converge for " + law.kind(), t,
                v);
  if (!(law.tilted_moment(t, -sigma, 1, 0) > 0.0))
    throw Error(Errc::violated_regularity,
                "root certification failed: E[X e^{tY-hX}] <= 0 for " + law.kind(), t, sigma);
  return sigma;
}

std::pair<double, double> rate_derivatives(const JointLaw& law, double t, double h) {
  double m10 = law.tilted_moment(t, -h, 1, 0);
  if (!(m10 > 0.0) || !std::isfinite(m10))
    throw Error(Errc::violated_regularity, "E[X e^{tY-hX}] must be positive", t, m10);
  double m01 = law.tilted_moment(t, -h, 0, 1);
  double m20 = law.tilted_moment(t, -h, 2, 0);
  double m11 = law.tilted_moment(t, -h, 1, 1);
  double m02 = law.tilted_moment(t, -h, 0, 2);
  double h1 = m01 / m10;
  double h2 = (m02 - 2.0 * h1 * m11 + h1 * h1 * m20) / m10;
  if (!(h2 > 0.0) || !std::isfinite(h2))
    throw Error(Errc::violated_regularity, "h'' must be positive", t, h2);
  return {h1, h2};
}

RateEval rate_eval(const JointLaw& law, double t, const SolverConfig& cfg) {
  double h = solve_h(law, t, cfg);
  auto [h1, h2] = rate_derivatives(law, t, h);
  return {t, h, h1, h2};
}

double solve_tau(const JointLaw& law, double c, const SolverConfig& cfg) {
  auto [t_lo, t_hi] = law.t_range();
  // Shrink towards the interior; the edges may be singular.
  double span = t_hi - t_lo;
  double a = t_lo + 1e-6 * span;
  double b = t_hi - 1e-6 * span;

  auto slope_at = [&](double t) { return rate_eval(law, t, cfg).h1; };

  // The advertised interval may not be evaluable out to its edges (transform
  // divergence or quadrature breakdown); walk the endpoints inward until the
  // slope evaluates, and treat the reachable interval as the attainable one.
  auto shrink = [&](double from, double toward) {
    double t = from;
    for (int k = 0; k < 60; ++k) {
      try {
        return std::make_pair(t, slope_at(t));
      } catch (const Error&) {
        t = toward + (t - toward) * 0.6;
      }
    }
    throw Error(Errc::rate_undefined, "no evaluable tilt near the range edge for " + law.kind(),
                from, toward);
  };
  double mid = 0.5 * (a + b);
  double fa, fb;
  std::tie(a, fa) = shrink(a, mid);
  std::tie(b, fb) = shrink(b, mid);
  if (!(c > fa) || !(c < fb)) {
    std::ostringstream os;
    os << "slope " << c << " outside the attainable range (" << fa << ", " << fb << ") for "
       << law.kind();
    throw Error(Errc::no_tilt, os.str(), fa, fb);
  }

  // Bisection with Newton acceleration on the strictly increasing h'.
  double t = 0.5 * (a + b);
  for (int it = 0; it < cfg.max_iter; ++it) {
    RateEval re = rate_eval(law, t, cfg);
    double g = re.h1 - c;
    if (std::fabs(g) <= 1e-11 * std::max(1.0, std::fabs(c))) return t;
    if (g > 0.0) b = t; else a = t;
    double cand = t - g / re.h2;
    t = (cand > a && cand < b) ? cand : 0.5 * (a + b);
    if (b - a < 1e-15 * std::max(1.0, std::fabs(t))) return t;
  }
  return t;
}

double legendre(const JointLaw& law, double tau, const SolverConfig& cfg) {
  RateEval re = rate_eval(law, tau, cfg);
  return tau * re.h1 - re.h;
}

}  // namespace ldp
