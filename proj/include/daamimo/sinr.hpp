#ifndef DAAMIMO_SINR_HPP
#define DAAMIMO_SINR_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "daamimo/estimation.hpp"

namespace daamimo {

// The trace statistics that reduce the downlink SINR to a function of the
// power coefficients alone:
//   chi[j][k][n]     = tr(W_{jk}^n R_{jk}^{jn})            desired-signal gain
//   zeta[j][k][l][i][n] = tr(W_{li}^n Q_{li}^n W_{li}^{nH} R_{jk}^{ln})
//                                                          incoherent interference
//   xi[j][k][l][n]   = tr(W_{lk}^n R_{jk}^{ln})            coherent pilot-sharing
//                                                          contamination, l != j
// All are stored as reals after checking the imaginary residual of each trace
// against 1e-10 relative to its natural scale. chi and zeta are nonnegative;
// xi can have either sign in general.
struct SinrCoefficients {
  int L = 0, K = 0, N = 0;
  std::vector<double> chi_;   // ((j*K + k)*N + n)
  std::vector<double> zeta_;  // ((((j*K + k)*L + l)*K + i)*N + n)
  std::vector<double> xi_;    // (((j*K + k)*L + l)*N + n); slots with l == j unused, zero

  double chi(int j, int k, int n) const { return chi_[(static_cast<std::size_t>(j) * K + k) * N + n]; }
  double zeta(int j, int k, int l, int i, int n) const {
    return zeta_[(((static_cast<std::size_t>(j) * K + k) * L + l) * K + i) * N + n];
  }
  double xi(int j, int k, int l, int n) const {
    return xi_[((static_cast<std::size_t>(j) * K + k) * L + l) * N + n];
  }
};

// Downlink power-control coefficients nu_{li}^n >= 0.
struct PowerAllocation {
  int L = 0, K = 0, N = 0;
  std::vector<double> nu_;  // ((l*K + i)*N + n)

  PowerAllocation() = default;
  PowerAllocation(int L_, int K_, int N_, double fill = 0.0)
      : L(L_), K(K_), N(N_), nu_(static_cast<std::size_t>(L_) * K_ * N_, fill) {}

  double nu(int l, int i, int n) const { return nu_[(static_cast<std::size_t>(l) * K + i) * N + n]; }
  double& nu(int l, int i, int n) { return nu_[(static_cast<std::size_t>(l) * K + i) * N + n]; }
};

struct SinrReport {
  int L = 0, K = 0;
  std::vector<double> gamma;  // (j*K + k)
  std::vector<double> se;     // b/s/Hz, (1 - K/tau_c) log2(1 + gamma)
  double sum_se = 0.0;
  double min_se = 0.0;

  double gamma_at(int j, int k) const { return gamma[static_cast<std::size_t>(j) * K + k]; }
  double se_at(int j, int k) const { return se[static_cast<std::size_t>(j) * K + k]; }
};

// Monte-Carlo estimate with batch-means uncertainty. The stderr vectors are
// indexed like SinrReport::gamma.
struct MonteCarloReport {
  SinrReport report;
  std::vector<double> gamma_stderr;
  std::vector<double> numerator_stderr;    // s.e. of |E D|^2
  std::vector<double> denominator_stderr;  // s.e. of the interference-plus-noise term
  long draws = 0;
  int batches = 0;
  std::uint64_t seed = 0;
};

// Throws std::runtime_error naming the offending trace when an imaginary
// residual exceeds tolerance (that indicates an upstream symmetry bug, not a
// property of valid inputs).
SinrCoefficients compute_coefficients(const CovarianceSet& cov, const EstimationSet& est);

double spectral_efficiency(double gamma, int K, int tau_c);

// gamma_{jk} = (sum_n nu_{jk}^n chi_{jk}^n)^2 /
//   ( sum_{l,i,n} (nu_{li}^n)^2 zeta_{jk}^{lin}
//     + sum_{l != j} (sum_n nu_{lk}^n xi_{jk}^{ln})^2 + sigma2 )
SinrReport closed_form_sinr(const SinrCoefficients& coeffs, const PowerAllocation& alloc,
                            double sigma2, int tau_c);

// Estimates every expectation in the effective-SINR ratio by sample averaging
// over channel/pilot-noise realizations with MRT precoders a = hhat. Data
// symbols are integrated out analytically. Draw d uses streams derived from
// (seed, d), so results are bit-identical for any thread count; batches
// (default: about 100) both partition the OpenMP work and provide batch-means
// standard errors.
MonteCarloReport monte_carlo_sinr(const CovarianceSet& cov, const EstimationSet& est,
                                  const PowerAllocation& alloc, double sigma2, int tau_c,
                                  long draws, std::uint64_t seed, int batches = 0);
MonteCarloReport monte_carlo_sinr_serial(const CovarianceSet& cov, const EstimationSet& est,
                                         const PowerAllocation& alloc, double sigma2, int tau_c,
                                         long draws, std::uint64_t seed, int batches = 0);

// CSV schema: cell,user,gamma,se for the closed form; Monte-Carlo adds
// gamma_stderr,numerator_stderr,denominator_stderr columns.
void write_sinr_csv(const SinrReport& report, std::ostream& out);
void write_sinr_csv(const MonteCarloReport& mc, std::ostream& out);

}  // namespace daamimo

#endif
