// Compares the serial reference loops against the OpenMP kernels on the
// Monte Carlo and renewal-density workloads, checking bit-identical results.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ldp/marginal.hpp"
#include "ldp/model.hpp"
#include "ldp/renewal.hpp"
#include "ldp/simulate.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename Fn>
double timed(const char* name, const Fn& fn) {
  auto t0 = clock_type::now();
  fn();
  double s = seconds_since(t0);
  std::printf("  %-34s %8.3f s\n", name, s);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int64_t n = argc > 1 ? std::atoll(argv[1]) : 400000;
#ifdef _OPENMP
  std::printf("threads available: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both modes run the serial loop\n");
#endif
  ldp::PoissonEpochLaw unit(ldp::PiecewisePoly::parse("0:1"), true);
  ldp::Marginal gamma21(2, 1.0);

  std::printf("tilted importance sampling, n = %lld paths (x = 30):\n",
              static_cast<long long>(n));
  ldp::SimEstimate serial_est, parallel_est;
  double ts = timed("serial reference", [&] {
    serial_est = ldp::estimate_tail_tilted(unit, 2.0, 30.0, n, 7, ldp::SimTarget::W,
                                           ldp::ExecMode::serial);
  });
  double tp = timed("openmp kernel", [&] {
    parallel_est = ldp::estimate_tail_tilted(unit, 2.0, 30.0, n, 7, ldp::SimTarget::W,
                                             ldp::ExecMode::parallel);
  });
  bool same = serial_est.p_hat == parallel_est.p_hat &&
              serial_est.stderr_ == parallel_est.stderr_ &&
              serial_est.hits == parallel_est.hits;
  std::printf("  bit-identical: %s, speedup %.2fx, p_hat = %.6e\n", same ? "yes" : "NO",
              ts / tp, parallel_est.p_hat);

  std::printf("crude Monte Carlo, n = %lld paths (x = 20):\n", static_cast<long long>(n));
  ldp::SimEstimate cs, cp;
  double ts2 = timed("serial reference", [&] {
    cs = ldp::estimate_tail_crude(unit, 1.2, 20.0, n, 7, ldp::ExecMode::serial);
  });
  double tp2 = timed("openmp kernel", [&] {
    cp = ldp::estimate_tail_crude(unit, 1.2, 20.0, n, 7, ldp::ExecMode::parallel);
  });
  std::printf("  bit-identical: %s, speedup %.2fx, p_hat = %.6e\n",
              cs.p_hat == cp.p_hat ? "yes" : "NO", ts2 / tp2, cp.p_hat);

  std::printf("renewal density windows, n = %lld paths:\n", static_cast<long long>(n));
  ldp::DensityDiagnostic ds, dp;
  double ts3 = timed("serial reference", [&] {
    ds = ldp::empirical_renewal_density(gamma21, {2.0, 8.0}, 0.25, n, 7,
                                        ldp::ExecMode::serial);
  });
  double tp3 = timed("openmp kernel", [&] {
    dp = ldp::empirical_renewal_density(gamma21, {2.0, 8.0}, 0.25, n, 7,
                                        ldp::ExecMode::parallel);
  });
  std::printf("  bit-identical: %s, speedup %.2fx, q(2) = %.5f\n",
              ds.q_hat == dp.q_hat ? "yes" : "NO", ts3 / tp3, dp.q_hat[0]);
  return same && cs.p_hat == cp.p_hat && ds.q_hat == dp.q_hat ? 0 : 1;
}
