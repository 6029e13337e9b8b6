#include "daamimo/sinr.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace daamimo {

namespace {

// tr(A B) without forming the product. The imaginary residual is checked
// against the product of Frobenius norms, the natural magnitude of the trace;
// a genuine symmetry bug shows up at that scale, roundoff sits near 1e-15.
double real_trace_product(const CMatrix& A, const CMatrix& B, const char* label) {
  const cplx t = A.transpose().cwiseProduct(B).sum();
  const double scale = A.norm() * B.norm();
  if (std::abs(t.imag()) > 1e-10 * std::max(scale, std::abs(t)))
    throw std::runtime_error(std::string("compute_coefficients: ") + label +
                             " has a non-vanishing imaginary part (upstream symmetry bug)");
  return t.real();
}

}  // namespace

SinrCoefficients compute_coefficients(const CovarianceSet& cov, const EstimationSet& est) {
  if (cov.L() != est.L() || cov.K() != est.K() || cov.N() != est.N() || cov.M() != est.M())
    throw std::invalid_argument("compute_coefficients: covariance and estimation sets disagree");
  const int L = cov.L(), K = cov.K(), N = cov.N();
  SinrCoefficients out;
  out.L = L;
  out.K = K;
  out.N = N;
  out.chi_.assign(static_cast<std::size_t>(L) * K * N, 0.0);
  out.zeta_.assign(static_cast<std::size_t>(L) * K * L * K * N, 0.0);
  out.xi_.assign(static_cast<std::size_t>(L) * K * L * N, 0.0);

  const std::ptrdiff_t users = static_cast<std::ptrdiff_t>(L) * K;
  // Exceptions may not escape the parallel region, so the first failure is
  // captured and rethrown afterwards.
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t jk = 0; jk < users; ++jk) {
    try {
      const int j = static_cast<int>(jk / K);
      const int k = static_cast<int>(jk % K);
      for (int n = 0; n < N; ++n)
        out.chi_[(static_cast<std::size_t>(j) * K + k) * N + n] =
            real_trace_product(est.W(j, n, k), cov.R(j, n, j, k), "chi");
      for (int l = 0; l < L; ++l)
        for (int n = 0; n < N; ++n) {
          for (int i = 0; i < K; ++i)
            out.zeta_[(((static_cast<std::size_t>(j) * K + k) * L + l) * K + i) * N + n] =
                real_trace_product(est.WQW(l, n, i), cov.R(l, n, j, k), "zeta");
          if (l != j)
            out.xi_[((static_cast<std::size_t>(j) * K + k) * L + l) * N + n] =
                real_trace_product(est.W(l, n, k), cov.R(l, n, j, k), "xi");
        }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double spectral_efficiency(double gamma, int K, int tau_c) {
  if (tau_c <= K) throw std::invalid_argument("spectral_efficiency: tau_c must exceed K");
  if (gamma < 0.0) throw std::invalid_argument("spectral_efficiency: gamma must be >= 0");
  return (1.0 - static_cast<double>(K) / tau_c) * std::log2(1.0 + gamma);
}

SinrReport closed_form_sinr(const SinrCoefficients& coeffs, const PowerAllocation& alloc,
                            double sigma2, int tau_c) {
  if (alloc.L != coeffs.L || alloc.K != coeffs.K || alloc.N != coeffs.N)
    throw std::invalid_argument("closed_form_sinr: allocation does not match coefficients");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("closed_form_sinr: sigma2 must be > 0");
  const int L = coeffs.L, K = coeffs.K, N = coeffs.N;

  SinrReport rep;
  rep.L = L;
  rep.K = K;
  rep.gamma.resize(static_cast<std::size_t>(L) * K);
  rep.se.resize(rep.gamma.size());

  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) {
      double num = 0.0;
      for (int n = 0; n < N; ++n) num += alloc.nu(j, k, n) * coeffs.chi(j, k, n);
      double den = sigma2;
      for (int l = 0; l < L; ++l) {
        for (int i = 0; i < K; ++i)
          for (int n = 0; n < N; ++n) {
            const double nu = alloc.nu(l, i, n);
            den += nu * nu * coeffs.zeta(j, k, l, i, n);
          }
        if (l != j) {
          double coherent = 0.0;
          for (int n = 0; n < N; ++n) coherent += alloc.nu(l, k, n) * coeffs.xi(j, k, l, n);
          den += coherent * coherent;
        }
      }
      rep.gamma[static_cast<std::size_t>(j) * K + k] = num * num / den;
    }

  rep.sum_se = 0.0;
  rep.min_se = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < rep.gamma.size(); ++u) {
    rep.se[u] = spectral_efficiency(rep.gamma[u], K, tau_c);
    rep.sum_se += rep.se[u];
    rep.min_se = std::min(rep.min_se, rep.se[u]);
  }
  return rep;
}

namespace {

struct BatchAccumulator {
  // Per user: sum of D, sum over draws of sum_{l,i} |g|^2.
  std::vector<cplx> sum_D;
  std::vector<double> sum_g2;
  long count = 0;

  explicit BatchAccumulator(std::size_t users) : sum_D(users, cplx(0, 0)), sum_g2(users, 0.0) {}
};

// One channel/pilot realization folded into the accumulator.
void accumulate_draw(const ChannelSampler& sampler, const CovarianceSet& cov,
                     const EstimationSet& est, const PowerAllocation& alloc, std::uint64_t seed,
                     long draw_index, BatchAccumulator& acc) {
  const ChannelRealization real = sampler.sample(derive_seed(seed, 1, static_cast<std::uint64_t>(draw_index)));
  const std::vector<CVector> hhat =
      simulate_pilot_and_estimate(real, cov, est, derive_seed(seed, 2, static_cast<std::uint64_t>(draw_index)));
  const int L = cov.L(), K = cov.K(), N = cov.N();

  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) {
      const std::size_t user = static_cast<std::size_t>(j) * K + k;
      double g2 = 0.0;
      cplx D(0, 0);
      for (int l = 0; l < L; ++l)
        for (int i = 0; i < K; ++i) {
          cplx g(0, 0);
          for (int n = 0; n < N; ++n)
            g += alloc.nu(l, i, n) * real.h[cov.index(l, n, j, k)].dot(hhat[est.index(l, n, i)]);
          g2 += std::norm(g);
          if (l == j && i == k) D = g;
        }
      acc.sum_D[user] += D;
      acc.sum_g2[user] += g2;
    }
}

MonteCarloReport mc_impl(const CovarianceSet& cov, const EstimationSet& est,
                         const PowerAllocation& alloc, double sigma2, int tau_c, long draws,
                         std::uint64_t seed, int batches, bool parallel) {
  if (draws < 1) throw std::invalid_argument("monte_carlo_sinr: draws must be >= 1");
  if (alloc.L != cov.L() || alloc.K != cov.K() || alloc.N != cov.N())
    throw std::invalid_argument("monte_carlo_sinr: allocation does not match covariance set");
  if (batches <= 0) batches = static_cast<int>(std::min<long>(100, draws));
  if (batches > draws) batches = static_cast<int>(draws);

  const ChannelSampler sampler(cov);
  const std::size_t users = static_cast<std::size_t>(cov.L()) * cov.K();
  std::vector<BatchAccumulator> acc(static_cast<std::size_t>(batches), BatchAccumulator(users));

  // Batch b covers draws [b*draws/B, (b+1)*draws/B); each batch is summed
  // serially in draw order and batches are combined in index order, so the
  // result is independent of the number of OpenMP threads.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int b = 0; b < batches; ++b) {
    const long lo = static_cast<long>(static_cast<long long>(b) * draws / batches);
    const long hi = static_cast<long>(static_cast<long long>(b + 1) * draws / batches);
    for (long d = lo; d < hi; ++d) accumulate_draw(sampler, cov, est, alloc, seed, d, acc[b]);
    acc[b].count = hi - lo;
  }

  std::vector<cplx> total_D(users, cplx(0, 0));
  std::vector<double> total_g2(users, 0.0);
  for (int b = 0; b < batches; ++b)
    for (std::size_t u = 0; u < users; ++u) {
      total_D[u] += acc[b].sum_D[u];
      total_g2[u] += acc[b].sum_g2[u];
    }

  MonteCarloReport out;
  out.draws = draws;
  out.batches = batches;
  out.seed = seed;
  out.report.L = cov.L();
  out.report.K = cov.K();
  out.report.gamma.resize(users);
  out.report.se.resize(users);
  out.gamma_stderr.assign(users, 0.0);
  out.numerator_stderr.assign(users, 0.0);
  out.denominator_stderr.assign(users, 0.0);

  const auto gamma_of = [sigma2](cplx mean_D, double mean_g2) {
    const double num = std::norm(mean_D);
    return num / (mean_g2 - num + sigma2);
  };

  for (std::size_t u = 0; u < users; ++u) {
    const cplx mean_D = total_D[u] / static_cast<double>(draws);
    const double mean_g2 = total_g2[u] / static_cast<double>(draws);
    out.report.gamma[u] = gamma_of(mean_D, mean_g2);

    if (batches > 1) {
      // Batch means of gamma, |E D|^2, and the denominator estimate give
      // batch-means standard errors for the full-sample estimators.
      double s_g = 0.0, s_g2 = 0.0, s_n = 0.0, s_n2 = 0.0, s_d = 0.0, s_d2 = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double cnt = static_cast<double>(acc[b].count);
        const cplx mD = acc[b].sum_D[u] / cnt;
        const double mg2 = acc[b].sum_g2[u] / cnt;
        const double gb = gamma_of(mD, mg2);
        const double nb = std::norm(mD);
        const double db = mg2 - nb + sigma2;
        s_g += gb;
        s_g2 += gb * gb;
        s_n += nb;
        s_n2 += nb * nb;
        s_d += db;
        s_d2 += db * db;
      }
      const double B = static_cast<double>(batches);
      const auto stderr_of = [B](double s, double s2) {
        const double var = std::max(0.0, (s2 - s * s / B) / (B - 1.0));
        return std::sqrt(var / B);
      };
      out.gamma_stderr[u] = stderr_of(s_g, s_g2);
      out.numerator_stderr[u] = stderr_of(s_n, s_n2);
      out.denominator_stderr[u] = stderr_of(s_d, s_d2);
    }
  }

  out.report.sum_se = 0.0;
  out.report.min_se = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < users; ++u) {
    out.report.se[u] = spectral_efficiency(out.report.gamma[u], cov.K(), tau_c);
    out.report.sum_se += out.report.se[u];
    out.report.min_se = std::min(out.report.min_se, out.report.se[u]);
  }
  return out;
}

void csv_header(std::ostream& out, bool mc) {
  out << "cell,user,gamma,se";
  if (mc) out << ",gamma_stderr,numerator_stderr,denominator_stderr";
  out << "\n";
}

void csv_value(std::ostream& out, double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  out << s.str();
}

}  // namespace

MonteCarloReport monte_carlo_sinr(const CovarianceSet& cov, const EstimationSet& est,
                                  const PowerAllocation& alloc, double sigma2, int tau_c,
                                  long draws, std::uint64_t seed, int batches) {
  return mc_impl(cov, est, alloc, sigma2, tau_c, draws, seed, batches, true);
}

MonteCarloReport monte_carlo_sinr_serial(const CovarianceSet& cov, const EstimationSet& est,
                                         const PowerAllocation& alloc, double sigma2, int tau_c,
                                         long draws, std::uint64_t seed, int batches) {
  return mc_impl(cov, est, alloc, sigma2, tau_c, draws, seed, batches, false);
}

void write_sinr_csv(const SinrReport& report, std::ostream& out) {
  csv_header(out, false);
  for (int j = 0; j < report.L; ++j)
    for (int k = 0; k < report.K; ++k) {
      out << j << ',' << k << ',';
      csv_value(out, report.gamma_at(j, k));
      out << ',';
      csv_value(out, report.se_at(j, k));
      out << '\n';
    }
}

void write_sinr_csv(const MonteCarloReport& mc, std::ostream& out) {
  csv_header(out, true);
  const SinrReport& r = mc.report;
  for (int j = 0; j < r.L; ++j)
    for (int k = 0; k < r.K; ++k) {
      const std::size_t u = static_cast<std::size_t>(j) * r.K + k;
      out << j << ',' << k << ',';
      csv_value(out, r.gamma[u]);
      out << ',';
      csv_value(out, r.se[u]);
      out << ',';
      csv_value(out, mc.gamma_stderr[u]);
      out << ',';
      csv_value(out, mc.numerator_stderr[u]);
      out << ',';
      csv_value(out, mc.denominator_stderr[u]);
      out << '\n';
    }
}

}  // namespace daamimo
