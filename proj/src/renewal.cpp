#include "ldp/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ldp/errors.hpp"
#include "ldp/rate.hpp"

namespace ldp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double RenewalProfile::value_at(double x) const {
  if (values.empty()) throw Error(Errc::domain, "empty profile");
  double pos = (x - x_lo) / grid.step;
  if (pos <= 0.0) return values.front();
  if (pos >= n() - 1) return values.back();
  int k = static_cast<int>(pos);
  double frac = pos - k;
  return values[k] * (1.0 - frac) + values[k + 1] * frac;
}

std::vector<double> RenewalProfile::prefix_integral() const {
  std::vector<double> acc(values.size(), 0.0);
  for (size_t k = 1; k < values.size(); ++k)
    acc[k] = acc[k - 1] + 0.5 * (values[k] + values[k - 1]) * grid.step;
  return acc;
}

namespace {

void estimate_limit_and_decay(RenewalProfile& p, double tail_fraction) {
  int n = p.n();
  if (n < 8) return;
  int k0 = std::max(0, n - std::max(2, static_cast<int>(n * tail_fraction)));
  double acc = 0.0;
  for (int k = k0; k < n; ++k) acc += p.values[k];
  double limit = acc / (n - k0);
  p.limit_estimate = limit;

  // Diagnostic log-linear fit of |Z - limit| over the middle of the domain.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  int klo = static_cast<int>(n * 0.4), khi = static_cast<int>(n * 0.9);
  for (int k = klo; k < khi; ++k) {
    double d = std::fabs(p.values[k] - limit);
    if (d < 1e-13) continue;
    double x = p.x_at(k), y = std::log(d);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m >= 8) {
    double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      double slope = (m * sxy - sx * sy) / denom;
      if (slope < 0.0) p.decay_rate_estimate = -slope;
    }
  }
}

RenewalProfile solve_volterra(const std::function<double(double)>& forcing,
                              const RenewalKernel& kernel, Grid grid,
                              const RenewalOptions& opt) {
  const int n = grid.n_points();
  const double dx = grid.step;
  std::vector<double> mass(n, 0.0);
  for (int j = 1; j < n; ++j) mass[j] = kernel.mass((j - 1) * dx, j * dx);

  RenewalProfile p;
  p.grid = grid;
  p.x_lo = 0.0;
  p.values.resize(n);
  p.values[0] = forcing(0.0);
  const double pivot = 1.0 - 0.5 * mass[1];
  for (int k = 1; k < n; ++k) {
    double s = 0.5 * mass[1] * p.values[k - 1];
    for (int j = 2; j <= k; ++j)
      s += 0.5 * mass[j] * (p.values[k - j] + p.values[k - j + 1]);
    p.values[k] = (forcing(k * dx) + s) / pivot;
    if (!std::isfinite(p.values[k]))
      throw Error(Errc::divergence, "renewal recursion produced a non-finite value", k * dx, 0.0);
  }
  estimate_limit_and_decay(p, opt.tail_fraction);
  return p;
}

RenewalProfile solve_two_sided(const std::function<double(double)>& forcing,
                               const RenewalKernel& kernel, Grid grid,
                               const RenewalOptions& opt) {
  const double dx = grid.step;
  const double u_cut = kernel.lower_cutoff();
  const int q = static_cast<int>(std::ceil(-u_cut / dx - 1e-9));
  const double x_lo = -q * dx;
  const int n = q + grid.n_points();

  // Cell j covers ((j-1-q) dx, (j-q) dx]; active range trims negligible mass.
  std::vector<double> mass(n, 0.0);
  int j_lo = n, j_hi = 0;
  for (int j = 1; j < n; ++j) {
    mass[j] = kernel.mass((j - 1 - q) * dx, (j - q) * dx);
    if (mass[j] > 1e-17) {
      j_lo = std::min(j_lo, j);
      j_hi = std::max(j_hi, j);
    }
  }
  if (j_lo > j_hi) throw Error(Errc::divergence, "renewal kernel carries no mass");

  RenewalProfile p;
  p.grid = grid;
  p.x_lo = x_lo;
  p.values.resize(n);
  std::vector<double> z(n);
  for (int k = 0; k < n; ++k) {
    z[k] = forcing(x_lo + k * dx);
    p.values[k] = z[k];
  }

  const double omega = opt.damping;
  double prev_delta = kInf;
  int growing = 0;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double delta = 0.0, scale = 1.0;
    for (int k = 0; k < n; ++k) {
      double conv = 0.0;
      int jmax = std::min(k, j_hi);
      for (int j = j_lo; j <= jmax; ++j) {
        int ia = std::min(k - j + q, n - 1);      // value at x_k - u_j
        int ib = std::min(k - j + q + 1, n - 1);  // value at x_k - u_{j-1}
        conv += 0.5 * mass[j] * (p.values[ia] + p.values[ib]);
      }
      double next = (1.0 - omega) * p.values[k] + omega * (z[k] + conv);
      delta = std::max(delta, std::fabs(next - p.values[k]));
      scale = std::max(scale, std::fabs(next));
      p.values[k] = next;
      if (!std::isfinite(next))
        throw Error(Errc::divergence, "two-sided renewal sweep produced a non-finite value");
    }
    if (delta <= opt.fixed_point_tol * scale) {
      estimate_limit_and_decay(p, opt.tail_fraction);
      return p;
    }
    if (delta > prev_delta) {
      if (++growing >= 50)
        throw Error(Errc::divergence, "two-sided renewal sweeps are not contracting", delta,
                    prev_delta);
    } else {
      growing = 0;
    }
    prev_delta = delta;
  }
  throw Error(Errc::divergence, "two-sided renewal iteration did not converge", prev_delta, 0.0);
}

}  // namespace

RenewalProfile solve_renewal(const std::function<double(double)>& forcing,
                             const RenewalKernel& kernel, Grid grid,
                             const RenewalOptions& opt) {
  if (!(grid.step > 0.0) || !(grid.x_max > 0.0))
    throw Error(Errc::config, "grid step and x_max must be positive");
  if (opt.enforce_step_bound) {
    auto mu = kernel.mean();
    if (mu && grid.step > *mu / 20.0)
      throw Error(Errc::config, "grid step must not exceed the driver mean / 20", grid.step, *mu);
  }
  if (kernel.lower_cutoff() >= 0.0) return solve_volterra(forcing, kernel, grid, opt);
  return solve_two_sided(forcing, kernel, grid, opt);
}

double renewal_residual(const RenewalProfile& p, const std::function<double(double)>& forcing,
                        const RenewalKernel& kernel) {
  const double dx = p.grid.step;
  const int n = p.n();
  const int q = static_cast<int>(std::lround(-p.x_lo / dx));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    double conv = 0.0;
    for (int j = 1; j <= k; ++j) {
      int ia = std::min(k - j + q, n - 1);
      int ib = std::min(k - j + q + 1, n - 1);
      conv += 0.5 * kernel.mass((j - 1 - q) * dx, (j - q) * dx) * (p.values[ia] + p.values[ib]);
    }
    worst = std::max(worst, std::fabs(p.values[k] - forcing(p.x_at(k)) - conv));
  }
  return worst;
}

RenewalProfile mgf_profile(const JointLaw& law, double t, Grid grid,
                           const MgfProfileOptions& opt) {
  double h = opt.h_override ? *opt.h_override : solve_h(law, t);
  auto solve = [&](bool normalized) {
    double w = normalized ? h : 0.0;
    TiltedKernel kernel(law, t, w);
    auto forcing = [&, w](double x) {
      double base = opt.first_passage ? law.y_mgf_tail(t, x) : law.tail_x(x);
      return normalized ? base * std::exp(-w * x) : base;
    };
    RenewalOptions ropt = opt.renewal;
    ropt.enforce_step_bound = false;  // the tilted driver mean is not exposed
    RenewalProfile p = solve_renewal(forcing, kernel, grid, ropt);
    p.growth_rate = w == 0.0 ? 0.0 : h;
    return p;
  };
  if (opt.normalized) return solve(true);
  try {
    return solve(false);
  } catch (const Error& e) {
    if (e.code() != Errc::divergence) throw;
    return solve(true);  // raw recursion overflowed; fall back to the normalized form
  }
}

double profile_log_rate(const RenewalProfile& profile, double x) {
  if (!(x > 0.0)) throw Error(Errc::domain, "log rate needs x > 0");
  return profile.growth_rate + std::log(profile.value_at(x)) / x;
}

GrowthBoundReport growth_bound_report(const JointLaw& law, double t, double h, double eps,
                                      const RenewalProfile& profile) {
  double big_h = (h >= 0.0 ? 1.0 : law.mgf_joint(0.0, -h)) + 1.0;
  double rho = law.mgf_joint(t, -(h + eps));
  GrowthBoundReport rep{};
  rep.rho = rho;
  if (!(rho < 1.0)) {
    rep.ok = false;
    rep.k_eps = kInf;
    rep.worst_ratio = kInf;
    return rep;
  }
  rep.k_eps = big_h / (1.0 - rho);
  double worst = 0.0;
  for (int k = 0; k < profile.n(); ++k) {
    double x = profile.x_at(k);
    if (x < 0.0) continue;
    // values are phi_x = M_x e^{-h x}; the bound reads phi_x <= K_eps e^{eps x}
    worst = std::max(worst, profile.values[k] * std::exp(-eps * x) / rep.k_eps);
  }
  rep.worst_ratio = worst;
  rep.ok = worst <= 1.0;
  return rep;
}

DensityDiagnostic empirical_renewal_density(const Marginal& law,
                                            const std::vector<double>& windows, double width,
                                            int64_t n, uint64_t seed, ExecMode mode) {
  if (windows.empty() || !(width > 0.0))
    throw Error(Errc::config, "density estimation needs windows and width > 0");
  if (n < 10000)
    throw Error(Errc::config, "density estimation needs n >= 10^4 paths", static_cast<double>(n),
                1e4);
  const int w = static_cast<int>(windows.size());
  double max_end = 0.0;
  for (double lo : windows) max_end = std::max(max_end, lo + width);

  constexpr int64_t kChunk = 4096;
  const int64_t n_chunks = (n + kChunk - 1) / kChunk;
  struct ChunkAcc {
    std::vector<double> sum, sumsq;
  };
  std::vector<ChunkAcc> acc(n_chunks);

  std::exception_ptr failure;
  auto run_chunk = [&](int64_t c) noexcept {
    try {
      ChunkAcc& a = acc[c];
      a.sum.assign(w, 0.0);
      a.sumsq.assign(w, 0.0);
      const int64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
      std::vector<double> count(w);
      for (int64_t i = lo; i < hi; ++i) {
        SplitRng rng(seed, static_cast<uint64_t>(i));
        std::fill(count.begin(), count.end(), 0.0);
        double s = 0.0;
        while (s <= max_end) {
          s += law.sample(rng);
          for (int j = 0; j < w; ++j)
            if (s >= windows[j] && s < windows[j] + width) count[j] += 1.0;
        }
        for (int j = 0; j < w; ++j) {
          a.sum[j] += count[j];
          a.sumsq[j] += count[j] * count[j];
        }
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(ldp_density_failure)
#endif
      {
        if (!failure) failure = std::current_exception();
      }
    }
  };

#ifdef _OPENMP
  if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    for (int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }
#else
  (void)mode;
  for (int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
#endif
  if (failure) std::rethrow_exception(failure);

  DensityDiagnostic d;
  d.window_lo = windows;
  d.width = width;
  d.target = 1.0 / law.mean();
  d.n_paths = n;
  d.q_hat.resize(w);
  d.stderr_.resize(w);
  for (int j = 0; j < w; ++j) {
    double sum = 0.0, sumsq = 0.0;
    for (const auto& a : acc) {  // fixed chunk order: reduction independent of threads
      sum += a.sum[j];
      sumsq += a.sumsq[j];
    }
    double mean = sum / n;
    double var = n > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1)) : 0.0;
    d.q_hat[j] = mean / width;
    d.stderr_[j] = std::sqrt(var / n) / width;
  }
  return d;
}

}  // namespace ldp
