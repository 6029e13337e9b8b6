#include "daamimo/covariance.hpp"

#include <cmath>
#include <numbers>
#include <cstring>
#include <fstream>

namespace daamimo {

double path_loss(double distance_m, const OneRingParams& params) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss: distance must be > 0");
  return std::pow(10.0, params.reference_gain_db / 10.0) * std::pow(distance_m, -params.pathloss_exponent);
}

namespace {

struct Integrand {
  double freq;  // 2*pi*D*(m-p)
  cplx operator()(double a) const {
    const double phase = -freq * std::sin(a);
    return {std::cos(phase), std::sin(phase)};
  }
};

// Adaptive Simpson with Richardson correction; falls back to a fine composite
// rule when the recursion depth runs out on some subinterval.
struct SimpsonState {
  Integrand f;
  double tol;
  bool converged = true;
  double worst_estimate = 0.0;

  cplx recurse(double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol_here, int depth) {
    const double m = 0.5 * (a + b);
    const double h = b - a;
    const cplx flm = f(0.5 * (a + m));
    const cplx frm = f(0.5 * (m + b));
    const cplx left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const cplx right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const cplx delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol_here) return left + right + delta / 15.0;
    if (depth <= 0) {
      converged = false;
      worst_estimate = std::max(worst_estimate, std::abs(delta) / 15.0);
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol_here, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol_here, depth - 1);
  }
};

cplx adaptive_simpson(const Integrand& f, double a, double b, double tol, bool& ok, double& err_estimate) {
  SimpsonState st{f, tol};
  const cplx fa = f(a);
  const cplx fb = f(b);
  const cplx fm = f(0.5 * (a + b));
  const cplx whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  const cplx v = st.recurse(a, b, fa, fm, fb, whole, tol, 48);
  ok = st.converged;
  err_estimate = st.worst_estimate;
  return v;
}

cplx composite_simpson(const Integrand& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  cplx acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * (h / 3.0);
}

}  // namespace

CovarianceMatrix one_ring_covariance(double azimuth, double beta, const OneRingParams& params, int M) {
  if (M < 1) throw std::invalid_argument("one_ring_covariance: M must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("one_ring_covariance: beta must be > 0");
  params.validate();

  const double delta = params.angular_spread_rad;
  const double lo = azimuth - delta;
  const double hi = azimuth + delta;
  const double tol = 1e-10;

  // Per-offset normalized correlations g(d); g(0) = 1 exactly.
  std::vector<cplx> g(M);
  g[0] = 1.0;
  for (int d = 1; d < M; ++d) {
    const Integrand f{2.0 * std::numbers::pi * params.antenna_spacing_wavelengths * d};
    bool ok = false;
    double err = 0.0;
    cplx v = adaptive_simpson(f, lo, hi, tol * 2.0 * delta, ok, err);
    if (!ok) {
      const cplx c1 = composite_simpson(f, lo, hi, 1 << 14);
      const cplx c2 = composite_simpson(f, lo, hi, 1 << 15);
      const double est = std::abs(c2 - c1) / 15.0;
      if (est > tol * 2.0 * delta)
        throw QuadratureError("one_ring_covariance: quadrature failed to reach 1e-10, achieved " +
                                  std::to_string(est / (2.0 * delta)),
                              est / (2.0 * delta));
      v = c2;
    }
    g[d] = v / (2.0 * delta);
  }

  CovarianceMatrix cov;
  cov.beta = beta;
  cov.entries.resize(M, M);
  for (int m = 0; m < M; ++m) {
    cov.entries(m, m) = beta;
    for (int p = 0; p < m; ++p) {
      const cplx e = beta * g[m - p];
      cov.entries(m, p) = e;
      cov.entries(p, m) = std::conj(e);
    }
  }
  return cov;
}

namespace {

CovarianceSet build_impl(const NetworkScenario& s, const OneRingParams& params, bool parallel) {
  s.validate();
  params.validate();
  CovarianceSet set(s.L, s.K, s.N, s.M);
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(set.size());

  // Exceptions (quadrature failures) may not escape the parallel region, so
  // the first one is captured and rethrown afterwards.
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    try {
      const int i = static_cast<int>(idx % s.K);
      const int l = static_cast<int>((idx / s.K) % s.L);
      const int n = static_cast<int>((idx / (static_cast<std::ptrdiff_t>(s.K) * s.L)) % s.N);
      const int j = static_cast<int>(idx / (static_cast<std::ptrdiff_t>(s.K) * s.L * s.N));
      const ArrayUserGeometry geo = geometry_of(s, j, n, l, i);
      CovarianceMatrix cov =
          one_ring_covariance(geo.azimuth, path_loss(geo.distance, params), params, s.M);
      cov.array_cell = j;
      cov.array_idx = n;
      cov.user_cell = l;
      cov.user_idx = i;
      set.at(j, n, l, i) = std::move(cov);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return set;
}

}  // namespace

CovarianceSet build_covariance_set(const NetworkScenario& s, const OneRingParams& params) {
  return build_impl(s, params, true);
}

CovarianceSet build_covariance_set_serial(const NetworkScenario& s, const OneRingParams& params) {
  return build_impl(s, params, false);
}

namespace {

constexpr char kMagic[8] = {'D', 'A', 'A', 'C', 'O', 'V', '1', '\n'};

void put_i64(std::ostream& out, std::int64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::int64_t get_i64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("covariance container: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_i64(out, static_cast<std::int64_t>(bits));
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = static_cast<std::uint64_t>(get_i64(in));
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_covariance_set(const CovarianceSet& set, std::ostream& out) {
  out.write(kMagic, 8);
  put_i64(out, set.L());
  put_i64(out, set.K());
  put_i64(out, set.N());
  put_i64(out, set.M());
  for (int j = 0; j < set.L(); ++j)
    for (int n = 0; n < set.N(); ++n)
      for (int l = 0; l < set.L(); ++l)
        for (int i = 0; i < set.K(); ++i) {
          const CovarianceMatrix& cov = set.at(j, n, l, i);
          put_f64(out, cov.beta);
          for (int r = 0; r < set.M(); ++r)
            for (int c = 0; c < set.M(); ++c) {
              put_f64(out, cov.entries(r, c).real());
              put_f64(out, cov.entries(r, c).imag());
            }
        }
  if (!out) throw std::runtime_error("covariance container: write failed");
}

void save_covariance_set(const CovarianceSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("covariance container: cannot open '" + path + "'");
  save_covariance_set(set, out);
}

CovarianceSet load_covariance_set(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("covariance container: bad magic");
  const auto L = get_i64(in), K = get_i64(in), N = get_i64(in), M = get_i64(in);
  if (L < 1 || K < 1 || N < 1 || M < 1 || L > 1 << 20 || K > 1 << 20 || N > 1 << 20 || M > 1 << 20)
    throw std::runtime_error("covariance container: implausible dimensions");
  CovarianceSet set(static_cast<int>(L), static_cast<int>(K), static_cast<int>(N), static_cast<int>(M));
  for (int j = 0; j < set.L(); ++j)
    for (int n = 0; n < set.N(); ++n)
      for (int l = 0; l < set.L(); ++l)
        for (int i = 0; i < set.K(); ++i) {
          CovarianceMatrix& cov = set.at(j, n, l, i);
          cov.beta = get_f64(in);
          cov.array_cell = j;
          cov.array_idx = n;
          cov.user_cell = l;
          cov.user_idx = i;
          cov.entries.resize(set.M(), set.M());
          for (int r = 0; r < set.M(); ++r)
            for (int c = 0; c < set.M(); ++c) {
              const double re = get_f64(in);
              const double im = get_f64(in);
              cov.entries(r, c) = {re, im};
            }
        }
  return set;
}

CovarianceSet load_covariance_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("covariance container: cannot open '" + path + "'");
  return load_covariance_set(in);
}

}  // namespace daamimo
