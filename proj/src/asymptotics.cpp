#include "ldp/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "ldp/errors.hpp"
#include "ldp/quadrature.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

// int_0^inf forcing(u) e^{-h u} du for the X >= 0 branch replacement is closed;
// the general branch subtracts the negative-duration correction
// int_{-inf}^0 g_x(t) e^{-h x} (int_0^{|x|} phi_u du) F(dx) using the profile.
double negative_part(const JointLaw& law, double t, double h, const RenewalProfile& profile) {
  auto prefix = profile.prefix_integral();
  auto cum_phi = [&](double upto) {
    // int_0^{upto} phi_u du from the profile's running integral
    double at0 = profile.x_lo < 0.0 ? -profile.x_lo / profile.grid.step : 0.0;
    auto interp = [&](double pos) {
      if (pos <= 0.0) return 0.0;
      if (pos >= profile.n() - 1) return prefix.back();
      int k = static_cast<int>(pos);
      double f = pos - k;
      return prefix[k] * (1.0 - f) + prefix[k + 1] * f;
    };
    return interp(at0 + upto / profile.grid.step) - interp(at0);
  };
  double lo = law.x_lower_cutoff(1e-14);
  auto f = [&](double x) {
    return law.conditional_mgf(t, x) * std::exp(-h * x) * cum_phi(-x) * law.x_density(x);
  };
  return integrate(f, lo, 0.0);
}

}  // namespace

double prefactor_B(const JointLaw& law, double t, double h, const RenewalProfile* profile,
                   double h_switch) {
  double B;
  if (law.x_nonneg()) {
    if (std::fabs(h) > h_switch) {
      B = (1.0 - law.mgf_joint(0.0, -h)) / h;
    } else {
      B = law.tilted_moment(0.0, 0.0, 1, 0);  // E[X]
    }
  } else {
    if (profile == nullptr)
      throw Error(Errc::config, "two-sided durations need an MGF profile for the prefactor");
    auto tail_term = [&](double u) { return law.tail_x(u) * std::exp(-h * u); };
    double pos = integrate_to_inf(tail_term, 0.0, law.beta_x() == -kInf ? -1.0 : law.beta_x() - h);
    B = pos - negative_part(law, t, h, *profile);
  }
  if (!(B > 0.0) || !std::isfinite(B))
    throw Error(Errc::positivity, "prefactor integral B must be positive for " + law.kind(), t, B);
  return B;
}

double prefactor_B_bar(const JointLaw& law, double t, double h, const RenewalProfile* profile,
                       double h_switch) {
  double ey = law.mgf_joint(t, 0.0);
  if (!std::isfinite(ey))
    throw Error(Errc::domain, "first-passage prefactor needs E[e^{tY}] < inf at t", t, ey);
  double B;
  if (law.x_nonneg()) {
    if (std::fabs(h) > h_switch) {
      // h^{-1} E[e^{tY}(1 - e^{-hX})]
      double tilted = law.mgf_joint(t, -h);
      B = (ey - tilted) / h;
    } else {
      B = law.tilted_moment(t, 0.0, 1, 0);  // E[X e^{tY}]
    }
  } else {
    if (profile == nullptr)
      throw Error(Errc::config, "two-sided durations need a first-passage profile");
    auto tail_term = [&](double u) { return law.y_mgf_tail(t, u) * std::exp(-h * u); };
    double pos = integrate_to_inf(tail_term, 0.0, law.beta_x() == -kInf ? -1.0 : law.beta_x() - h);
    B = pos - negative_part(law, t, h, *profile);
  }
  if (!(B > 0.0) || !std::isfinite(B))
    throw Error(Errc::positivity, "first-passage prefactor must be positive for " + law.kind(), t,
                B);
  return B;
}

Prefactor prefactor(const JointLaw& law, double t, double h, PrefactorVariant variant,
                    const RenewalProfile* profile, double h_switch) {
  Prefactor p;
  p.t = t;
  p.variant = variant;
  p.B = variant == PrefactorVariant::standard ? prefactor_B(law, t, h, profile, h_switch)
                                              : prefactor_B_bar(law, t, h, profile, h_switch);
  p.denom = law.tilted_moment(t, -h, 1, 0);
  if (!(p.denom > 0.0))
    throw Error(Errc::violated_regularity, "E[X e^{tY-hX}] must be positive", t, p.denom);
  p.phi = p.B / p.denom;
  if (!(p.phi > 0.0) || !std::isfinite(p.phi))
    throw Error(Errc::positivity, "prefactor must lie in (0, inf)", t, p.phi);
  return p;
}

double frac_ceil(double a, double snap_tol) {
  double r = std::round(a);
  if (std::fabs(a - r) < snap_tol) return 0.0;
  return std::ceil(a) - a;
}

namespace {

struct Core {
  RateEval rate;
  Prefactor pf;
  double hstar;
};

Core tail_core(const JointLaw& law, double c, const TailOptions& opt, PrefactorVariant variant,
               RenewalProfile* owned_profile) {
  double tau = solve_tau(law, c, opt.solver);
  if (!(tau > 0.0))
    throw Error(Errc::domain, "tail asymptotics need tau > 0; requested slope too small", c, tau);
  RateEval re = rate_eval(law, tau, opt.solver);
  const RenewalProfile* profile = opt.profile;
  if (!law.x_nonneg() && profile == nullptr) {
    MgfProfileOptions mopt;
    mopt.first_passage = variant == PrefactorVariant::first_passage;
    mopt.h_override = re.h;
    *owned_profile = mgf_profile(law, tau, Grid{opt.profile_x_max, opt.profile_step}, mopt);
    profile = owned_profile;
  }
  Prefactor pf = prefactor(law, tau, re.h, variant, profile, opt.h_switch);
  double hstar = tau * re.h1 - re.h;
  return {re, pf, hstar};
}

TailApprox assemble(const JointLaw& law, double c, double x, double shift_a, double shift_b,
                    Regime regime, const Core& core) {
  TailApprox ta;
  ta.c = c;
  ta.x = x;
  ta.tau = core.rate.t;
  ta.hstar = core.hstar;
  ta.regime = regime;
  ta.components.prefactor = core.pf.phi;
  ta.components.h = core.rate.h;
  ta.components.h2 = core.rate.h2;
  ta.components.sqrt_term_log = -0.5 * std::log(kTwoPi * x * core.rate.h2);

  double corr_log;
  if (regime == Regime::lattice) {
    double d = *law.y_span();
    double frac = frac_ceil(x * c / d);
    corr_log = std::log(d) - d * ta.tau * frac - std::log1p(-std::exp(-ta.tau * d));
  } else {
    corr_log = -std::log(ta.tau);
  }
  ta.components.lattice_corr_log = corr_log;
  ta.components.shift_log = shift_a * core.rate.h - shift_b * ta.tau;

  ta.log_prob = std::log(core.pf.phi) + ta.components.sqrt_term_log + corr_log - x * core.hstar +
                ta.components.shift_log;
  ta.prob = std::exp(ta.log_prob);
  return ta;
}

}  // namespace

TailApprox tail_nonlattice(const JointLaw& law, double c, double x, const TailOptions& opt) {
  if (law.y_span())
    throw Error(Errc::domain, "law has lattice rewards; use the lattice form for " + law.kind());
  RenewalProfile prof;
  Core core = tail_core(law, c, opt, PrefactorVariant::standard, &prof);
  return assemble(law, c, x, 0.0, 0.0, Regime::nonlattice, core);
}

TailApprox tail_lattice(const JointLaw& law, double c, double x, const TailOptions& opt) {
  if (!law.y_span())
    throw Error(Errc::domain, "law has no reward span; use the nonlattice form for " + law.kind());
  RenewalProfile prof;
  Core core = tail_core(law, c, opt, PrefactorVariant::standard, &prof);
  return assemble(law, c, x, 0.0, 0.0, Regime::lattice, core);
}

TailApprox tail_shifted(const JointLaw& law, double c, double x, double a, double b,
                        const TailOptions& opt) {
  if (law.y_span())
    throw Error(Errc::domain, "shifted form applies to nonlattice rewards");
  RenewalProfile prof;
  Core core = tail_core(law, c, opt, PrefactorVariant::standard, &prof);
  TailApprox ta = assemble(law, c, x, a, b, Regime::nonlattice, core);
  ta.regime = (a == 0.0 && b == 0.0) ? Regime::nonlattice : Regime::shifted;
  return ta;
}

TailApprox tail_first_passage(const JointLaw& law, double c, double x, const TailOptions& opt) {
  if (!law.y_mgf_everywhere())
    throw Error(Errc::domain,
                "first-passage asymptotics need E[e^{tY}] < inf for all t; unsupported for " +
                    law.kind());
  RenewalProfile prof;
  Core core = tail_core(law, c, opt, PrefactorVariant::first_passage, &prof);
  Regime base = law.y_span() ? Regime::lattice : Regime::nonlattice;
  TailApprox ta = assemble(law, c, x, 0.0, 0.0, base, core);
  ta.regime = Regime::first_passage;
  return ta;
}

}  // namespace ldp
