#include "daamimo/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace daamimo {

CMatrix compute_Q(const std::vector<CMatrix>& covariances_sharing_pilot, double rho_tr) {
  if (covariances_sharing_pilot.empty()) throw std::invalid_argument("compute_Q: no covariances given");
  if (!(rho_tr > 0.0)) throw std::invalid_argument("compute_Q: rho_tr must be > 0");
  const Eigen::Index M = covariances_sharing_pilot.front().rows();
  CMatrix Q = CMatrix::Zero(M, M);
  for (const CMatrix& R : covariances_sharing_pilot) {
    if (R.rows() != M || R.cols() != M) throw std::invalid_argument("compute_Q: dimension mismatch");
    Q += R;
  }
  Q += (1.0 / rho_tr) * CMatrix::Identity(M, M);
  return Q;
}

CMatrix compute_W(const CMatrix& R_desired, const CMatrix& Q) {
  if (R_desired.rows() != Q.rows() || R_desired.cols() != Q.cols() || Q.rows() != Q.cols())
    throw std::invalid_argument("compute_W: dimension mismatch");
  Eigen::LLT<CMatrix> llt(Q);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "compute_W: Q is not numerically positive definite (rcond estimate " << llt.rcond() << ")";
    throw std::runtime_error(msg.str());
  }
  // W Q = R  <=>  Q W^H = R^H = R, so W = (Q^{-1} R)^H.
  return llt.solve(R_desired).adjoint();
}

namespace {

EstimationSet build_est_impl(const CovarianceSet& cov, double rho_tr, bool parallel) {
  if (!(rho_tr > 0.0)) throw std::invalid_argument("build_estimation_set: rho_tr must be > 0");
  EstimationSet est(cov.L(), cov.K(), cov.N(), cov.M(), rho_tr);
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(cov.L()) * cov.N() * cov.K();

  // Exceptions (non-PD observation covariance) may not escape the parallel
  // region, so the first one is captured and rethrown afterwards.
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    try {
      const int i = static_cast<int>(idx % cov.K());
      const int n = static_cast<int>((idx / cov.K()) % cov.N());
      const int l = static_cast<int>(idx / (static_cast<std::ptrdiff_t>(cov.K()) * cov.N()));
      CMatrix Q = (1.0 / rho_tr) * CMatrix::Identity(cov.M(), cov.M());
      for (int lp = 0; lp < cov.L(); ++lp) Q += cov.R(l, n, lp, i);
      CMatrix W = compute_W(cov.R(l, n, l, i), Q);
      // W Q W^H = R Q^{-1} R, Hermitian by construction up to roundoff.
      CMatrix wqw = W * cov.R(l, n, l, i);
      wqw = 0.5 * (wqw + wqw.adjoint()).eval();
      const double trace = wqw.trace().real();
      est.set(static_cast<std::size_t>(idx), std::move(Q), std::move(W), std::move(wqw), trace);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return est;
}

}  // namespace

EstimationSet build_estimation_set(const CovarianceSet& cov, double rho_tr) {
  return build_est_impl(cov, rho_tr, true);
}

EstimationSet build_estimation_set_serial(const CovarianceSet& cov, double rho_tr) {
  return build_est_impl(cov, rho_tr, false);
}

ChannelSampler::ChannelSampler(const CovarianceSet& cov) : cov_(&cov), factors_(cov.size()) {
  for (std::size_t idx = 0; idx < cov.size(); ++idx) {
    const CMatrix& R = cov.mat(idx).entries;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("ChannelSampler: eigenfactorization failed");
    const double trace = R.trace().real();
    Eigen::VectorXd lambda = es.eigenvalues();
    for (Eigen::Index e = 0; e < lambda.size(); ++e) {
      if (lambda(e) < -1e-10 * std::max(trace, 1.0))
        throw std::invalid_argument("ChannelSampler: covariance is not PSD");
      if (lambda(e) < 0.0) lambda(e) = 0.0;
    }
    factors_[idx] = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  }
}

ChannelRealization ChannelSampler::sample(std::uint64_t seed) const {
  ChannelRealization out;
  out.seed = seed;
  out.h.resize(factors_.size());
  ComplexNormal rng(seed);
  const Eigen::Index M = cov_->M();
  for (std::size_t idx = 0; idx < factors_.size(); ++idx) out.h[idx] = factors_[idx] * rng.vector(M);
  return out;
}

std::vector<CVector> simulate_pilot_and_estimate(const ChannelRealization& realization,
                                                 const CovarianceSet& cov, const EstimationSet& est,
                                                 std::uint64_t noise_seed) {
  if (realization.h.size() != cov.size())
    throw std::invalid_argument("simulate_pilot_and_estimate: realization does not match covariance set");
  const double noise_scale = 1.0 / std::sqrt(est.rho_tr());
  std::vector<CVector> hhat(static_cast<std::size_t>(cov.L()) * cov.N() * cov.K());
  ComplexNormal rng(noise_seed);
  for (int l = 0; l < cov.L(); ++l)
    for (int n = 0; n < cov.N(); ++n)
      for (int i = 0; i < cov.K(); ++i) {
        CVector y = noise_scale * rng.vector(cov.M());
        for (int lp = 0; lp < cov.L(); ++lp) y += realization.h[cov.index(l, n, lp, i)];
        hhat[est.index(l, n, i)] = est.W(l, n, i) * y;
      }
  return hhat;
}

}  // namespace daamimo
