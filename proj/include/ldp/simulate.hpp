#pragma once

#include <cstdint>
#include <optional>

#include "ldp/exec.hpp"
#include "ldp/model.hpp"
#include "ldp/rate.hpp"

namespace ldp {

/// One simulated path up to the first time the duration sum exceeds x.
struct PathOutcome {
  int64_t n_epochs = 0;   // N(x)
  double s = 0.0;         // S(x), duration sum over the first N(x) epochs
  double w = 0.0;         // W(x), reward sum over the first N(x) epochs
  int64_t t_idx = 0;      // T(x) = N(x) + 1
  double wbar = 0.0;      // reward sum including the crossing epoch
  double log_weight = 0.0;  // sum of h x_i - tau y_i over i <= T(x); 0 for base draws
};

enum class SimMethod { crude, tilted };
enum class SimTarget { W, Wbar };

struct SimEstimate {
  double p_hat = 0.0;
  double stderr_ = 0.0;
  int64_t n = 0;
  int64_t hits = 0;
  SimMethod method = SimMethod::crude;
  uint64_t seed = 0;
  std::optional<double> tau_used;
  // Weight-only change-of-measure diagnostics (tilted runs).
  double mass_mean = 0.0;
  double mass_stderr = 0.0;
  bool high_variance_warning = false;  // relative stderr above 50%
};

inline constexpr int64_t kStepCap = 1'000'000'000;

/// Draws epochs until the duration sum first exceeds x. Throws
/// Errc::nontermination past the step cap.
PathOutcome simulate_path(const JointLaw& law, double x, SplitRng& rng);

/// Same under the tilted measure P_tau; accumulates the log likelihood ratio.
PathOutcome simulate_path_tilted(const JointLaw& law, double x, double tau, double h,
                                 SplitRng& rng);

/// Event threshold for {value >= c x}: lattice rewards snap to d ceil(cx/d).
double event_threshold(const JointLaw& law, double c, double x);

/// Direct Monte Carlo of Pr{W(x) >= cx}. Reproducible: path i draws from the
/// substream (seed, i); chunk sums are reduced in fixed order, so the result
/// does not depend on ExecMode or the number of workers.
SimEstimate estimate_tail_crude(const JointLaw& law, double c, double x, int64_t n, uint64_t seed,
                                ExecMode mode = ExecMode::parallel);

/// Importance sampling under P_tau with tau = solve_tau(c) (or the override).
/// The per-path estimator is e^{log_weight} 1{target >= cx}.
SimEstimate estimate_tail_tilted(const JointLaw& law, double c, double x, int64_t n,
                                 uint64_t seed, SimTarget target = SimTarget::W,
                                 ExecMode mode = ExecMode::parallel,
                                 std::optional<double> tau_override = std::nullopt,
                                 const SolverConfig& cfg = {});

}  // namespace ldp
