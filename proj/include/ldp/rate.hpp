#pragma once

#include "ldp/model.hpp"

namespace ldp {

/// Rate function bundle at one tilt parameter.
struct RateEval {
  double t;
  double h;   // root of E[e^{tY - hX}] = 1 at the increasing crossing
  double h1;  // h'(t)
  double h2;  // h''(t), strictly positive
};

struct SolverConfig {
  double bracket_expand = 4.0;
  double tol_root = 1e-12;
  int max_iter = 200;
};

/// Solves E[e^{tY - sX}] = 1 for s, selecting the root where
/// E[X e^{tY - sX}] > 0 (the lower edge of the feasible tilt set).
double solve_h(const JointLaw& law, double t, const SolverConfig& cfg = {});

/// h'(t) = E[Y e^{tY-hX}] / E[X e^{tY-hX}],
/// h''(t) = E[(Y - h'X)^2 e^{tY-hX}] / E[X e^{tY-hX}]; requires h = solve_h(t).
std::pair<double, double> rate_derivatives(const JointLaw& law, double t, double h);

RateEval rate_eval(const JointLaw& law, double t, const SolverConfig& cfg = {});

/// Unique tau with h'(tau) = c; throws Errc::no_tilt carrying the attainable
/// slope range when c lies outside it.
double solve_tau(const JointLaw& law, double c, const SolverConfig& cfg = {});

/// Legendre transform value h*(h'(tau)) = tau h'(tau) - h(tau).
double legendre(const JointLaw& law, double tau, const SolverConfig& cfg = {});

}  // namespace ldp
