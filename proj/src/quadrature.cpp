#include "ldp/quadrature.hpp"

#include <cmath>
#include <limits>

#include "ldp/errors.hpp"

namespace ldp {

namespace {

// Kronrod-15 nodes/weights on [-1,1] and embedded Gauss-7 weights.
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.000000000000000};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct PanelResult {
  double kronrod;
  double err;
};

PanelResult panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double f1 = f(c - x);
    double f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {resk * h, std::fabs((resk - resg) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol_abs,
             int depth, const QuadratureOptions& opt, double* partial) {
  PanelResult r = panel(f, a, b);
  if (r.err <= tol_abs || r.err <= std::fabs(r.kronrod) * opt.rel_tol) return r.kronrod;
  if (depth >= opt.max_depth) {
    *partial += r.kronrod;
    throw Error(Errc::quadrature, "quadrature refinement budget exhausted", *partial, r.err);
  }
  double m = 0.5 * (a + b);
  double left = adapt(f, a, m, 0.5 * tol_abs, depth + 1, opt, partial);
  *partial += left;
  double right = adapt(f, m, b, 0.5 * tol_abs, depth + 1, opt, partial);
  *partial -= left;
  return left + right;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  PanelResult first = panel(f, a, b);
  double tol = std::max(opt.abs_tol, std::fabs(first.kronrod) * opt.rel_tol);
  double partial = 0.0;
  return adapt(f, a, b, tol, 0, opt, &partial);
}

double integrate_to_inf(const std::function<double(double)>& f, double a, double decay_slope,
                        const QuadratureOptions& opt) {
  if (!(decay_slope < 0.0))
    throw Error(Errc::quadrature, "tail decay slope must be negative", decay_slope, 0.0);
  double total = 0.0;
  double lo = a;
  double len = std::max(1.0, 2.0 / -decay_slope);
  for (int seg = 0; seg < 64; ++seg) {
    double hi = lo + len;
    total += integrate(f, lo, hi, opt);
    // Remainder bound: |f(hi)| * int_hi^inf e^{slope (x-hi)} dx.
    double rem = std::fabs(f(hi)) / -decay_slope;
    if (rem <= std::max(opt.abs_tol, std::fabs(total) * 1e-14)) return total;
    lo = hi;
    len *= 2.0;
  }
  throw Error(Errc::quadrature, "tail extension budget exhausted", total, 0.0);
}

}  // namespace ldp
