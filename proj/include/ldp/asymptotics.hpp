#pragma once

#include <optional>

#include "ldp/model.hpp"
#include "ldp/rate.hpp"
#include "ldp/renewal.hpp"

namespace ldp {

enum class Regime { nonlattice, lattice, shifted, first_passage };

enum class PrefactorVariant { standard, first_passage };

/// Subexponential constant phi(t) = B / E[X e^{tY - hX}] of the tail expansion.
struct Prefactor {
  double t = 0.0;
  double B = 0.0;
  double denom = 0.0;  // E[X e^{tY - h(t)X}]
  double phi = 0.0;    // B / denom
  PrefactorVariant variant = PrefactorVariant::standard;
};

struct TailComponents {
  double prefactor = 0.0;          // phi (or phi_bar)
  double h = 0.0;                  // h(tau)
  double h2 = 0.0;                 // h''(tau)
  double sqrt_term_log = 0.0;      // -0.5 log(2 pi x h'')
  double lattice_corr_log = 0.0;   // lattice: -d tau {xc/d} - log(1 - e^{-tau d}); else -log tau
  double shift_log = 0.0;          // a h(tau) - b tau
};

struct TailApprox {
  double c = 0.0;
  double x = 0.0;
  double tau = 0.0;
  double hstar = 0.0;  // h*(c)
  double log_prob = 0.0;
  double prob = 0.0;
  Regime regime = Regime::nonlattice;
  TailComponents components;
};

struct TailOptions {
  double h_switch = 1e-8;  // below this |h|, the h->0 prefactor branch applies
  SolverConfig solver;
  // Two-sided durations need an MGF profile for the prefactor integral.
  double profile_step = 0.01;
  double profile_x_max = 30.0;
  const RenewalProfile* profile = nullptr;  // optional precomputed profile at tau
};

/// B(X, t): for X >= 0 the closed two-branch form; otherwise the double
/// integral against the supplied MGF profile.
double prefactor_B(const JointLaw& law, double t, double h,
                   const RenewalProfile* profile = nullptr, double h_switch = 1e-8);

/// First-passage variant; requires E[e^{tY}] < inf at the evaluated t.
/// Two-sided durations need a first-passage profile.
double prefactor_B_bar(const JointLaw& law, double t, double h,
                       const RenewalProfile* profile = nullptr, double h_switch = 1e-8);

Prefactor prefactor(const JointLaw& law, double t, double h, PrefactorVariant variant,
                    const RenewalProfile* profile = nullptr, double h_switch = 1e-8);

/// Pr{W(x) >= cx} ~ phi(tau)/(tau sqrt(2 pi x h'')) e^{-x h*(c)}; continuous rewards.
TailApprox tail_nonlattice(const JointLaw& law, double c, double x, const TailOptions& opt = {});

/// Lattice rewards with span d: the 1/tau factor becomes
/// d e^{-d tau {xc/d}} / (1 - e^{-tau d}), with {a} = ceil(a) - a snapped at integers.
TailApprox tail_lattice(const JointLaw& law, double c, double x, const TailOptions& opt = {});

/// Pr{W(x+a) >= cx + b}: the nonlattice value times e^{a h(tau) - b tau}.
TailApprox tail_shifted(const JointLaw& law, double c, double x, double a, double b,
                        const TailOptions& opt = {});

/// First-passage sum W-bar: same shape with phi replaced by phi_bar.
TailApprox tail_first_passage(const JointLaw& law, double c, double x,
                              const TailOptions& opt = {});

/// Fractional part {a} = ceil(a) - a with an integer snap guard.
double frac_ceil(double a, double snap_tol = 1e-9);

}  // namespace ldp
