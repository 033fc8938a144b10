#include "ldp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ldp/errors.hpp"

namespace ldp {

namespace {

constexpr int64_t kChunk = 4096;

struct ChunkSums {
  double est = 0.0;
  double est_sq = 0.0;
  double mass = 0.0;
  double mass_sq = 0.0;
  int64_t hits = 0;
};

template <typename PathFn>
std::vector<ChunkSums> run_chunks(int64_t n, ExecMode mode, const PathFn& per_path) {
  const int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkSums> sums(n_chunks);
  std::exception_ptr failure;
  auto run = [&](int64_t c) noexcept {
    try {
      ChunkSums acc;
      const int64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
      for (int64_t i = lo; i < hi; ++i) per_path(static_cast<uint64_t>(i), acc);
      sums[c] = acc;
    } catch (...) {  // exceptions must not unwind through the parallel region
#ifdef _OPENMP
#pragma omp critical(ldp_chunk_failure)
#endif
      {
        if (!failure) failure = std::current_exception();
      }
    }
  };
#ifdef _OPENMP
  if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int64_t c = 0; c < n_chunks; ++c) run(c);
  } else {
    for (int64_t c = 0; c < n_chunks; ++c) run(c);
  }
#else
  (void)mode;
  for (int64_t c = 0; c < n_chunks; ++c) run(c);
#endif
  if (failure) std::rethrow_exception(failure);
  return sums;
}

}  // namespace

PathOutcome simulate_path(const JointLaw& law, double x, SplitRng& rng) {
  if (!(x >= 0.0)) throw Error(Errc::domain, "path horizon must be nonnegative");
  PathOutcome out;
  double sum = 0.0;
  for (int64_t steps = 1; steps <= kStepCap; ++steps) {
    Sample sm = law.sample(rng);
    if (sum + sm.x > x) {
      out.t_idx = steps;
      out.n_epochs = steps - 1;
      out.s = sum;
      out.wbar = out.w + sm.y;
      return out;
    }
    sum += sm.x;
    out.w += sm.y;
  }
  throw Error(Errc::nontermination, "path exceeded the step cap for " + law.kind(), x, 0.0);
}

PathOutcome simulate_path_tilted(const JointLaw& law, double x, double tau, double h,
                                 SplitRng& rng) {
  if (!(x >= 0.0)) throw Error(Errc::domain, "path horizon must be nonnegative");
  PathOutcome out;
  double sum = 0.0;
  for (int64_t steps = 1; steps <= kStepCap; ++steps) {
    Sample sm = law.sample_tilted(tau, h, rng);
    out.log_weight += h * sm.x - tau * sm.y;
    if (sum + sm.x > x) {
      out.t_idx = steps;
      out.n_epochs = steps - 1;
      out.s = sum;
      out.wbar = out.w + sm.y;
      return out;
    }
    sum += sm.x;
    out.w += sm.y;
  }
  throw Error(Errc::nontermination, "tilted path exceeded the step cap for " + law.kind(), x, 0.0);
}

double event_threshold(const JointLaw& law, double c, double x) {
  double thresh = c * x;
  if (auto d = law.y_span()) {
    double q = thresh / *d;
    double r = std::round(q);
    double snapped = (std::fabs(q - r) < 1e-9) ? r : std::ceil(q);
    thresh = *d * snapped;
  }
  return thresh;
}

SimEstimate estimate_tail_crude(const JointLaw& law, double c, double x, int64_t n, uint64_t seed,
                                ExecMode mode) {
  if (n < 1) throw Error(Errc::config, "crude estimate needs n >= 1");
  const double thresh = event_threshold(law, c, x);
  const double eps = law.y_span() ? 0.5 * *law.y_span() * 1e-9 : 0.0;
  auto per_path = [&](uint64_t i, ChunkSums& acc) {
    SplitRng rng(seed, i);
    PathOutcome po = simulate_path(law, x, rng);
    if (po.w >= thresh - eps) {
      acc.est += 1.0;
      acc.hits += 1;
    }
  };
  auto sums = run_chunks(n, mode, per_path);
  SimEstimate est;
  est.method = SimMethod::crude;
  est.seed = seed;
  est.n = n;
  for (const auto& s : sums) {
    est.p_hat += s.est;
    est.hits += s.hits;
  }
  est.p_hat /= static_cast<double>(n);
  est.stderr_ = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
  est.mass_mean = 1.0;
  est.mass_stderr = 0.0;
  return est;
}

SimEstimate estimate_tail_tilted(const JointLaw& law, double c, double x, int64_t n,
                                 uint64_t seed, SimTarget target, ExecMode mode,
                                 std::optional<double> tau_override, const SolverConfig& cfg) {
  if (n < 1) throw Error(Errc::config, "tilted estimate needs n >= 1");
  const double tau = tau_override ? *tau_override : solve_tau(law, c, cfg);
  if (!(tau > 0.0)) throw Error(Errc::domain, "importance sampling needs tau > 0", c, tau);
  const double h = solve_h(law, tau, cfg);
  const double thresh = event_threshold(law, c, x);
  const double eps = law.y_span() ? 0.5 * *law.y_span() * 1e-9 : 0.0;

  auto per_path = [&](uint64_t i, ChunkSums& acc) {
    SplitRng rng(seed, i);
    PathOutcome po = simulate_path_tilted(law, x, tau, h, rng);
    double weight = std::exp(po.log_weight);
    double value = target == SimTarget::W ? po.w : po.wbar;
    acc.mass += weight;
    acc.mass_sq += weight * weight;
    if (value >= thresh - eps) {
      acc.est += weight;
      acc.est_sq += weight * weight;
      acc.hits += 1;
    }
  };
  auto sums = run_chunks(n, mode, per_path);

  SimEstimate est;
  est.method = SimMethod::tilted;
  est.seed = seed;
  est.n = n;
  est.tau_used = tau;
  double se = 0.0, se2 = 0.0, sm = 0.0, sm2 = 0.0;
  for (const auto& s : sums) {
    se += s.est;
    se2 += s.est_sq;
    sm += s.mass;
    sm2 += s.mass_sq;
    est.hits += s.hits;
  }
  const double dn = static_cast<double>(n);
  est.p_hat = se / dn;
  est.mass_mean = sm / dn;
  if (n > 1) {
    est.stderr_ = std::sqrt(std::max(0.0, (se2 - dn * est.p_hat * est.p_hat) / (dn - 1.0)) / dn);
    est.mass_stderr =
        std::sqrt(std::max(0.0, (sm2 - dn * est.mass_mean * est.mass_mean) / (dn - 1.0)) / dn);
  }
  est.high_variance_warning = est.p_hat > 0.0 && est.stderr_ > 0.5 * est.p_hat;
  return est;
}

}  // namespace ldp
