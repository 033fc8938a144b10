#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ldp/exec.hpp"
#include "ldp/marginal.hpp"
#include "ldp/model.hpp"

namespace ldp {

struct Grid {
  double x_max;
  double step;

  int n_points() const { return static_cast<int>(std::floor(x_max / step + 1e-9)) + 1; }
};

/// Grid-valued solution of a renewal-type equation, optionally with the
/// exponential growth factored out (growth_rate = h for MGF profiles).
struct RenewalProfile {
  Grid grid{0.0, 0.0};
  double x_lo = 0.0;  // leftmost grid point (negative for two-sided drivers)
  std::vector<double> values;
  std::optional<double> limit_estimate;
  std::optional<double> decay_rate_estimate;
  double growth_rate = 0.0;

  double x_at(int k) const { return x_lo + k * grid.step; }
  int n() const { return static_cast<int>(values.size()); }
  /// Linear interpolation of the stored values.
  double value_at(double x) const;
  /// Running integral of the stored values from x_lo to x (trapezoid).
  std::vector<double> prefix_integral() const;
};

/// Increment distribution driving a renewal equation, reduced to what the
/// solver needs: cell masses and a truncation point for the negative tail.
class RenewalKernel {
public:
  virtual ~RenewalKernel() = default;
  virtual double mass(double a, double b) const = 0;  // measure of (a, b]
  virtual double lower_cutoff() const { return 0.0; } // 0 for nonnegative drivers
  virtual std::optional<double> mean() const { return std::nullopt; }
};

class MarginalKernel : public RenewalKernel {
public:
  explicit MarginalKernel(Marginal law) : law_(law) {}
  double mass(double a, double b) const override { return law_.cdf(b) - law_.cdf(a); }
  std::optional<double> mean() const override { return law_.mean(); }

private:
  Marginal law_;
};

/// Tilted duration kernel g_u(t) e^{-w u} F(du).
class TiltedKernel : public RenewalKernel {
public:
  TiltedKernel(const JointLaw& law, double t, double w, double neg_mass_tol = 1e-12)
      : law_(law), t_(t), w_(w), neg_tol_(neg_mass_tol) {}
  double mass(double a, double b) const override { return law_.weighted_x_mass(t_, w_, a, b); }
  double lower_cutoff() const override {
    return law_.x_nonneg() ? 0.0 : law_.x_lower_cutoff(neg_tol_);
  }

private:
  const JointLaw& law_;
  double t_;
  double w_;
  double neg_tol_;
};

struct RenewalOptions {
  double fixed_point_tol = 1e-12;
  int max_sweeps = 2000;
  double damping = 0.7;      // two-sided fixed-point relaxation
  double tail_fraction = 0.1;  // portion of the grid averaged into limit_estimate
  bool enforce_step_bound = true;  // step <= mean/20 when the kernel mean is known
};

/// Solves Z(x) = z(x) + int_{u <= x} Z(x - u) K(du) on the grid.
/// Nonnegative drivers use the implicit trapezoid Volterra recursion; two-sided
/// drivers a damped ascending fixed point on [lower cutoff, x_max], treating
/// values beyond x_max as the converged plateau. Throws Errc::divergence when
/// the sweep sup-norm keeps growing.
RenewalProfile solve_renewal(const std::function<double(double)>& forcing,
                             const RenewalKernel& kernel, Grid grid,
                             const RenewalOptions& opt = {});

/// Sup-norm defect of a solved profile plugged back into its equation.
double renewal_residual(const RenewalProfile& profile,
                        const std::function<double(double)>& forcing,
                        const RenewalKernel& kernel);

struct MgfProfileOptions {
  bool first_passage = false;
  bool normalized = true;            // false solves the raw MGF recursion
  std::optional<double> h_override;  // skip the rate solve when supplied
  RenewalOptions renewal;
};

/// Profile of x -> E[e^{t W(x)}] (or the first-passage variant). In normalized
/// form the values are phi_x(t) = M_x(t) e^{-h(t) x} and limit_estimate targets
/// the prefactor phi(t).
RenewalProfile mgf_profile(const JointLaw& law, double t, Grid grid,
                           const MgfProfileOptions& opt = {});

/// (1/x) log M_x(t) read off a normalized profile.
double profile_log_rate(const RenewalProfile& profile, double x);

struct GrowthBoundReport {
  bool ok;
  double k_eps;        // H(h)/(1 - rho(t, eps))
  double rho;          // E[e^{tY - (h+eps)X}]
  double worst_ratio;  // max over the grid of phi_x e^{-eps x} / K_eps
};

/// Checks M_x(t) <= K_eps e^{(h+eps)x} at every grid point of a normalized
/// profile, with the explicit K_eps constant.
GrowthBoundReport growth_bound_report(const JointLaw& law, double t, double h, double eps,
                                      const RenewalProfile& profile);

struct DensityDiagnostic {
  std::vector<double> window_lo;  // left edges; windows are [x, x + width)
  std::vector<double> q_hat;
  std::vector<double> stderr_;
  double width = 0.0;
  double target = 0.0;  // reciprocal mean of the driving law
  int64_t n_paths = 0;
};

/// Monte Carlo estimate of the renewal density over the given windows:
/// q(x) ~= E[#renewal epochs in [x, x+width)] / width. Deterministic for a
/// fixed seed regardless of ExecMode or thread count.
DensityDiagnostic empirical_renewal_density(const Marginal& law,
                                            const std::vector<double>& windows, double width,
                                            int64_t n, uint64_t seed,
                                            ExecMode mode = ExecMode::parallel);

}  // namespace ldp
