#include <cstdio>
#include <functional>

#include <omp.h>

#include "daamimo/covariance.hpp"
#include "daamimo/sinr.hpp"

namespace {

using daamimo::CovarianceSet;
using daamimo::EstimationSet;
using daamimo::MonteCarloReport;

double timed(const std::function<void()>& fn) {
  const double t0 = omp_get_wtime();
  fn();
  return omp_get_wtime() - t0;
}

void print_row(const char* kernel, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s %10.3f %10.3f %8.2fx %10s\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "identical" : "DIFFER");
}

bool sets_identical(const CovarianceSet& a, const CovarianceSet& b) {
  for (std::size_t idx = 0; idx < a.size(); ++idx)
    if (a.mat(idx).entries != b.mat(idx).entries) return false;
  return true;
}

bool reports_identical(const MonteCarloReport& a, const MonteCarloReport& b) {
  return a.report.gamma == b.report.gamma && a.gamma_stderr == b.gamma_stderr;
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-22s %10s %10s %9s %10s\n", "kernel", "serial [s]", "parallel", "speedup",
              "outputs");

  {
    daamimo::GeometryParams geom;
    const daamimo::NetworkScenario scen = daamimo::build_ring_network(geom, 7, 10, 4, 16);
    daamimo::OneRingParams ring;
    CovarianceSet serial_set, parallel_set;
    const double ts = timed([&] { serial_set = daamimo::build_covariance_set_serial(scen, ring); });
    const double tp = timed([&] { parallel_set = daamimo::build_covariance_set(scen, ring); });
    print_row("covariance build", ts, tp, sets_identical(serial_set, parallel_set));
  }

  {
    daamimo::GeometryParams geom;
    const daamimo::NetworkScenario scen = daamimo::build_ring_network(geom, 2, 2, 2, 8);
    daamimo::OneRingParams ring;
    const CovarianceSet cov = daamimo::build_covariance_set(scen, ring);
    EstimationSet serial_est(0, 0, 0, 0, scen.rho_tr), parallel_est(0, 0, 0, 0, scen.rho_tr);
    const double ts =
        timed([&] { serial_est = daamimo::build_estimation_set_serial(cov, scen.rho_tr); });
    const double tp = timed([&] { parallel_est = daamimo::build_estimation_set(cov, scen.rho_tr); });
    bool same = true;
    for (int l = 0; l < scen.L && same; ++l)
      for (int n = 0; n < scen.N && same; ++n)
        for (int i = 0; i < scen.K && same; ++i)
          same = serial_est.W(l, n, i) == parallel_est.W(l, n, i);
    print_row("channel estimation", ts, tp, same);

    const daamimo::PowerAllocation alloc(scen.L, scen.K, scen.N, 0.1);
    const long draws = 20000;
    MonteCarloReport serial_mc, parallel_mc;
    const double ms = timed([&] {
      serial_mc = daamimo::monte_carlo_sinr_serial(cov, parallel_est, alloc, scen.sigma2,
                                                   scen.tau_c, draws, 42);
    });
    const double mp = timed([&] {
      parallel_mc =
          daamimo::monte_carlo_sinr(cov, parallel_est, alloc, scen.sigma2, scen.tau_c, draws, 42);
    });
    print_row("monte carlo sinr", ms, mp, reports_identical(serial_mc, parallel_mc));
  }

  return 0;
}
