#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

enum class Errc {
  config,                // bad user input / missing required option
  domain,                // argument outside the mathematical domain
  rate_undefined,        // no root of the tilt equation within the search budget
  no_tilt,               // requested slope outside the attainable range
  violated_regularity,   // a positivity/convexity requirement failed numerically
  unsupported_tilt,      // sampler cannot realize the requested tilt
  quadrature,            // integration did not converge within the budget
  divergence,            // fixed-point renewal sweep diverged
  nontermination,        // path simulation hit the step cap
  positivity,            // a quantity that must be positive came out <= 0
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Error(Errc code, const std::string& what, double a, double b)
      : std::runtime_error(what), code_(code), a_(a), b_(b) {}

  Errc code() const { return code_; }
  // Optional numeric payload (e.g. attainable range, partial integral).
  double payload_a() const { return a_; }
  double payload_b() const { return b_; }

private:
  Errc code_;
  double a_ = 0.0;
  double b_ = 0.0;
};

}  // namespace ldp
