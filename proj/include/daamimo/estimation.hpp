#ifndef DAAMIMO_ESTIMATION_HPP
#define DAAMIMO_ESTIMATION_HPP

#include <cstdint>
#include <vector>

#include "daamimo/common.hpp"
#include "daamimo/covariance.hpp"

namespace daamimo {

// Pilot observation covariance for pilot index i: sum of the given covariances
// plus (1/rho_tr) I. Hermitian PD with eigenvalues >= 1/rho_tr.
CMatrix compute_Q(const std::vector<CMatrix>& covariances_sharing_pilot, double rho_tr);

// MMSE filter W = R_desired * Q^{-1}, computed via a Cholesky solve of Q
// (never an explicit inverse). Throws when Q is not numerically PD, with the
// reciprocal condition estimate in the message.
CMatrix compute_W(const CMatrix& R_desired, const CMatrix& Q);

// Per (serving cell l, array n, pilot/user index i): the pilot observation
// covariance Q, the MMSE filter W, and the estimate covariance W Q W^H whose
// trace sets the per-stream transmit power under MRT. Note tr(W Q W^H) equals
// tr(W R) since W Q = R.
class EstimationSet {
 public:
  EstimationSet() = default;
  EstimationSet(int L, int K, int N, int M, double rho_tr)
      : L_(L), K_(K), N_(N), M_(M), rho_tr_(rho_tr) {
    const std::size_t total = static_cast<std::size_t>(L) * N * K;
    Q_.resize(total);
    W_.resize(total);
    wqw_.resize(total);
    wqw_trace_.resize(total, 0.0);
  }

  int L() const { return L_; }
  int K() const { return K_; }
  int N() const { return N_; }
  int M() const { return M_; }
  double rho_tr() const { return rho_tr_; }

  std::size_t index(int l, int n, int i) const {
    return (static_cast<std::size_t>(l) * N_ + n) * K_ + i;
  }
  const CMatrix& Q(int l, int n, int i) const { return Q_[index(l, n, i)]; }
  const CMatrix& W(int l, int n, int i) const { return W_[index(l, n, i)]; }
  const CMatrix& WQW(int l, int n, int i) const { return wqw_[index(l, n, i)]; }
  double wqw_trace(int l, int n, int i) const { return wqw_trace_[index(l, n, i)]; }

  void set(std::size_t idx, CMatrix Q, CMatrix W, CMatrix wqw, double trace) {
    Q_[idx] = std::move(Q);
    W_[idx] = std::move(W);
    wqw_[idx] = std::move(wqw);
    wqw_trace_[idx] = trace;
  }

 private:
  int L_ = 0, K_ = 0, N_ = 0, M_ = 0;
  double rho_tr_ = 0.0;
  std::vector<CMatrix> Q_, W_, wqw_;
  std::vector<double> wqw_trace_;
};

// OpenMP over (l,n,i); bit-identical to the serial reference for any thread
// count (each entry is computed independently).
EstimationSet build_estimation_set(const CovarianceSet& cov, double rho_tr);
EstimationSet build_estimation_set_serial(const CovarianceSet& cov, double rho_tr);

// One draw of every channel h_{li}^{jn}, indexed like the CovarianceSet
// (observing cell j, array n, source cell l, user i).
struct ChannelRealization {
  std::vector<CVector> h;
  std::uint64_t seed = 0;
};

// Samples h = F z with F F^H = R (eigenfactorization; tiny negative
// eigenvalues are clamped to zero, ones below -1e-10 * trace are an error)
// and z i.i.d. circularly-symmetric complex standard normal. Factors are
// cached at construction so repeated draws cost only a matrix-vector product.
class ChannelSampler {
 public:
  explicit ChannelSampler(const CovarianceSet& cov);

  // Deterministic given the seed; channels are drawn in CovarianceSet index
  // order from a single stream.
  ChannelRealization sample(std::uint64_t seed) const;

  const CovarianceSet& covariances() const { return *cov_; }

 private:
  const CovarianceSet* cov_;
  std::vector<CMatrix> factors_;
};

// Pilot observation and MMSE estimation at every serving array: for user
// (l,i) at array (l,n), y = sum over cells l' of h_{l'i}^{ln} plus
// (1/sqrt(rho_tr)) times fresh complex normal noise, and hhat = W y.
// Returned vector is indexed by EstimationSet::index(l,n,i). Noise is drawn
// in that index order from a stream seeded by noise_seed.
std::vector<CVector> simulate_pilot_and_estimate(const ChannelRealization& realization,
                                                 const CovarianceSet& cov, const EstimationSet& est,
                                                 std::uint64_t noise_seed);

}  // namespace daamimo

#endif
