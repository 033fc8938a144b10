#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldp/marginal.hpp"
#include "ldp/rng.hpp"

namespace ldp {

struct Sample {
  double x;
  double y;
};

/// Nonnegative piecewise-polynomial intensity on [0, inf). Piece k lives on
/// [breaks[k], breaks[k+1]) with coefficients in powers of (x - breaks[k]);
/// the last piece extends to infinity.
class PiecewisePoly {
public:
  PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coeffs);

  /// Text form: pieces separated by '|', each "start:c0,c1,...".
  /// Example: "0:1" is the unit intensity; "0:2 | 1:0.5" is a step.
  static PiecewisePoly parse(const std::string& text);

  double eval(double x) const;
  /// Exact running integral F(x) = int_0^x f.
  double integral(double x) const;
  /// lim_{x->inf} f(x); +inf when the last piece has positive higher-order terms.
  double asymptotic_rate() const;
  bool piecewise_constant() const;
  const std::vector<double>& breaks() const { return breaks_; }
  std::string describe() const;

private:
  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
  std::vector<double> cum_;  // F at each breakpoint
};

/// Joint law of one epoch (X, Y): duration X and reward Y. Implementations
/// provide closed-form transforms where the model admits them; the generic
/// quadrature route is always available for cross-checking.
///
/// Conventions: mgf_joint and tilted_moment return +inf (not an error) when
/// the defining expectation diverges, so root bracketing may probe freely.
class JointLaw {
public:
  virtual ~JointLaw() = default;

  const std::string& kind() const { return kind_; }
  virtual std::string describe() const { return kind_; }
  bool x_nonneg() const { return x_nonneg_; }
  std::optional<double> y_span() const { return y_span_; }
  /// limsup (1/x) log Pr{X > x}, analytic per model.
  double beta_x() const { return beta_x_; }
  /// Open interval of tilt parameters the rate machinery may probe.
  std::pair<double, double> t_range() const { return t_range_; }
  /// True when E[e^{tY}] < inf for every real t (first-passage prerequisite).
  bool y_mgf_everywhere() const { return y_mgf_everywhere_; }
  double scale_hint() const { return scale_hint_; }
  virtual std::optional<double> closed_form_rate(double /*t*/) const { return std::nullopt; }

  /// E[e^{tY + sX}].
  virtual double mgf_joint(double t, double s) const = 0;

  /// E[X^i Y^j e^{tY + sX}], i,j in {0,1,2}, i+j <= 2.
  double tilted_moment(double t, double s, int i, int j) const;

  /// g_x(t) = E[e^{tY} | X = x].
  double conditional_mgf(double t, double x) const { return conditional_moment(t, x, 0); }
  /// E[Y^j e^{tY} | X = x], j in {0,1,2}.
  virtual double conditional_moment(double t, double x, int j) const = 0;

  /// Pr{X > x}.
  virtual double tail_x(double x) const = 0;
  virtual double x_density(double x) const = 0;

  /// Reference route by adaptive quadrature over the X marginal.
  double mgf_joint_quadrature(double t, double s) const;
  double tilted_moment_quadrature(double t, double s, int i, int j) const;

  /// int_(a,b] g_u(t) e^{-w u} F(du) - renewal kernel cell mass.
  virtual double weighted_x_mass(double t, double w, double a, double b) const;

  /// E[e^{tY} 1{X > x}].
  virtual double y_mgf_tail(double t, double x) const;

  /// Lower integration cutoff: largest z with F((-inf, z)) <= p (0 for X >= 0).
  virtual double x_lower_cutoff(double p) const;

  virtual Sample sample(SplitRng& rng) const = 0;
  /// Draw from P_t(dx, dy) = e^{t y - h x} P(dx, dy); caller supplies h = h(t).
  virtual Sample sample_tilted(double t, double h, SplitRng& rng) const = 0;

protected:
  virtual double tilted_moment_impl(double t, double s, int i, int j) const = 0;

  // Generic-quadrature support.
  virtual std::vector<double> x_breakpoints() const { return {}; }
  /// Asymptotic d/dx log of x^i g_x-ish integrands as x -> +inf; >= 0 means divergent,
  /// -inf means superexponential decay.
  virtual double upper_log_slope(double t, double s) const = 0;
  /// Point beyond which the reported slope bounds the local log-derivative.
  virtual double upper_tail_start(double t, double s) const;

  std::string kind_;
  bool x_nonneg_ = true;
  std::optional<double> y_span_;
  double beta_x_ = -1.0;
  std::pair<double, double> t_range_{-30.0, 30.0};
  bool y_mgf_everywhere_ = false;
  double scale_hint_ = 1.0;
};

/// X ~ Exp(1), Y | X ~ Poisson(F(X)) with F the integral of a piecewise
/// intensity f. Lattice rewards with span 1.
class PoissonEpochLaw : public JointLaw {
public:
  explicit PoissonEpochLaw(PiecewisePoly f, bool unit_variant = false);

  std::string describe() const override;
  std::optional<double> closed_form_rate(double t) const override;
  double mgf_joint(double t, double s) const override;
  double conditional_moment(double t, double x, int j) const override;
  double tail_x(double x) const override;
  double x_density(double x) const override;
  double weighted_x_mass(double t, double w, double a, double b) const override;
  double y_mgf_tail(double t, double x) const override;
  Sample sample(SplitRng& rng) const override;
  Sample sample_tilted(double t, double h, SplitRng& rng) const override;

  const PiecewisePoly& intensity() const { return f_; }
  bool unit_variant() const { return unit_; }

protected:
  double tilted_moment_impl(double t, double s, int i, int j) const override;
  std::vector<double> x_breakpoints() const override;
  double upper_log_slope(double t, double s) const override;
  double upper_tail_start(double t, double s) const override;

private:
  double mgf_joint_step_analytic(double t, double s) const;
  double tilt_log_bound(double t, double h) const;  // sup_x {F(x)(e^t-1) - h x}

  PiecewisePoly f_;
  bool unit_;
};

/// X ~ Exp(1), Y = 1{X > M}.
class ThresholdLaw : public JointLaw {
public:
  explicit ThresholdLaw(double m);

  std::string describe() const override;
  double mgf_joint(double t, double s) const override;
  double conditional_moment(double t, double x, int j) const override;
  double tail_x(double x) const override;
  double x_density(double x) const override;
  double weighted_x_mass(double t, double w, double a, double b) const override;
  double y_mgf_tail(double t, double x) const override;
  Sample sample(SplitRng& rng) const override;
  Sample sample_tilted(double t, double h, SplitRng& rng) const override;

  double threshold() const { return m_; }

protected:
  double tilted_moment_impl(double t, double s, int i, int j) const override;
  std::vector<double> x_breakpoints() const override;
  double upper_log_slope(double t, double s) const override;

private:
  double m_;
};

/// X ~ N(0,1), Y = 1{X >= a} - 1{X < a}. Two-sided durations.
class GaussSignLaw : public JointLaw {
public:
  explicit GaussSignLaw(double a);

  std::string describe() const override;
  double mgf_joint(double t, double s) const override;
  double conditional_moment(double t, double x, int j) const override;
  double tail_x(double x) const override;
  double x_density(double x) const override;
  double weighted_x_mass(double t, double w, double a, double b) const override;
  double y_mgf_tail(double t, double x) const override;
  double x_lower_cutoff(double p) const override;
  Sample sample(SplitRng& rng) const override;
  Sample sample_tilted(double t, double h, SplitRng& rng) const override;

  double split_point() const { return a_; }

protected:
  double tilted_moment_impl(double t, double s, int i, int j) const override;
  std::vector<double> x_breakpoints() const override;
  double upper_log_slope(double t, double s) const override;
  double upper_tail_start(double t, double s) const override;

private:
  double a_;
};

/// Independent X and Y with Erlang marginals.
class ProductLaw : public JointLaw {
public:
  ProductLaw(Marginal law_x, Marginal law_y);

  std::string describe() const override;
  std::optional<double> closed_form_rate(double t) const override;
  double mgf_joint(double t, double s) const override;
  double conditional_moment(double t, double x, int j) const override;
  double tail_x(double x) const override;
  double x_density(double x) const override;
  double weighted_x_mass(double t, double w, double a, double b) const override;
  double y_mgf_tail(double t, double x) const override;
  Sample sample(SplitRng& rng) const override;
  Sample sample_tilted(double t, double h, SplitRng& rng) const override;

  const Marginal& law_x() const { return x_; }
  const Marginal& law_y() const { return y_; }

protected:
  double tilted_moment_impl(double t, double s, int i, int j) const override;
  double upper_log_slope(double t, double s) const override;

private:
  Marginal x_;
  Marginal y_;
};

/// Builds a model from a key-value spec. Recognized keys:
///   model = poisson-epoch | poisson-epoch-unit | threshold | gauss-sign |
///           independent-product
///   f = piecewise intensity (poisson-epoch), M = real (threshold),
///   a = real (gauss-sign), x/y = marginal laws (independent-product).
/// Unknown keys are rejected.
std::unique_ptr<JointLaw> make_model(const std::map<std::string, std::string>& kv);

/// Parses "key = value; key = value" text or, if the argument names an
/// existing file, its lines ('#' comments allowed), then calls make_model.
std::unique_ptr<JointLaw> parse_model_spec(const std::string& spec_or_path);

}  // namespace ldp
