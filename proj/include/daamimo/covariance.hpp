#ifndef DAAMIMO_COVARIANCE_HPP
#define DAAMIMO_COVARIANCE_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "daamimo/common.hpp"
#include "daamimo/scenario.hpp"

namespace daamimo {

// Average channel gain at the given distance: 10^(ref_db/10) * d^(-exponent).
double path_loss(double distance_m, const OneRingParams& params);

struct CovarianceMatrix {
  CMatrix entries;  // M x M Hermitian PSD, trace = M * beta
  double beta = 0.0;
  int array_cell = -1, array_idx = -1, user_cell = -1, user_idx = -1;
};

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Entry (m,p) = beta/(2*Delta) * integral over [azimuth-Delta, azimuth+Delta]
// of exp(-i*2*pi*D*(m-p)*sin(a)) da. The integrand depends on m-p only, so the
// result is Hermitian Toeplitz with an exactly-beta diagonal; the M-1 distinct
// off-diagonal values are computed by adaptive Simpson quadrature (abs tol
// 1e-10 per entry, composite fallback) and mirrored conjugate.
CovarianceMatrix one_ring_covariance(double azimuth, double beta, const OneRingParams& params, int M);

// All R_{li}^{jn}, indexed by (observing cell j, array n, source cell l, user i).
class CovarianceSet {
 public:
  CovarianceSet() = default;
  CovarianceSet(int L, int K, int N, int M)
      : L_(L), K_(K), N_(N), M_(M), mats_(static_cast<std::size_t>(L) * N * L * K) {}

  int L() const { return L_; }
  int K() const { return K_; }
  int N() const { return N_; }
  int M() const { return M_; }

  std::size_t index(int j, int n, int l, int i) const {
    return ((static_cast<std::size_t>(j) * N_ + n) * L_ + l) * K_ + i;
  }
  const CovarianceMatrix& at(int j, int n, int l, int i) const { return mats_[index(j, n, l, i)]; }
  CovarianceMatrix& at(int j, int n, int l, int i) { return mats_[index(j, n, l, i)]; }
  const CMatrix& R(int j, int n, int l, int i) const { return mats_[index(j, n, l, i)].entries; }
  double beta(int j, int n, int l, int i) const { return mats_[index(j, n, l, i)].beta; }
  const CovarianceMatrix& mat(std::size_t flat) const { return mats_[flat]; }
  std::size_t size() const { return mats_.size(); }

 private:
  int L_ = 0, K_ = 0, N_ = 0, M_ = 0;
  std::vector<CovarianceMatrix> mats_;
};

// OpenMP over the (j,n,l,i) quadruples; bit-identical to the serial reference
// for any thread count (each matrix is computed independently).
CovarianceSet build_covariance_set(const NetworkScenario& s, const OneRingParams& params);
CovarianceSet build_covariance_set_serial(const NetworkScenario& s, const OneRingParams& params);

// Binary container: magic "DAACOV1\n", int64 L,K,N,M, then per (j,n,l,i) in
// index order: beta and M*M complex entries row-major (real,imag doubles),
// all little-endian.
void save_covariance_set(const CovarianceSet& set, std::ostream& out);
void save_covariance_set(const CovarianceSet& set, const std::string& path);
CovarianceSet load_covariance_set(std::istream& in);
CovarianceSet load_covariance_set(const std::string& path);

}  // namespace daamimo

#endif
