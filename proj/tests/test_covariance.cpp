#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "daamimo/covariance.hpp"

using namespace daamimo;

namespace {

constexpr double pi = std::numbers::pi;

// Fixed-panel composite Simpson rule, the independent cross-check for the
// adaptive quadrature inside one_ring_covariance.
cplx simpson_reference(double azimuth, double spread, double freq, int panels) {
  const double lo = azimuth - spread;
  const double h = 2.0 * spread / (2 * panels);
  cplx acc = 0.0;
  const auto f = [&](double a) {
    const double phase = -freq * std::sin(a);
    return cplx{std::cos(phase), std::sin(phase)};
  };
  for (int p = 0; p < panels; ++p) {
    const double a = lo + 2 * p * h;
    acc += f(a) + 4.0 * f(a + h) + f(a + 2 * h);
  }
  return acc * (h / 3.0) / (2.0 * spread);
}

}  // namespace

TEST_CASE("path loss basics") {
  OneRingParams params;
  CHECK(path_loss(700.0, params) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(path_loss(1.0, params) == doctest::Approx(std::pow(10.0, params.reference_gain_db / 10.0)));
  // Log-domain form: 10 log10 beta = ref_db - 10 a log10 d.
  const double d = 431.7;
  const double db = 10.0 * std::log10(path_loss(d, params));
  CHECK(db == doctest::Approx(params.reference_gain_db - 10.0 * params.pathloss_exponent * std::log10(d))
                  .epsilon(1e-12));
  CHECK(path_loss(350.0, params) > path_loss(700.0, params));
  CHECK_THROWS_AS(path_loss(0.0, params), std::invalid_argument);
}

TEST_CASE("single antenna covariance is the path gain") {
  OneRingParams params;
  const CovarianceMatrix cov = one_ring_covariance(0.7, 2.5, params, 1);
  REQUIRE(cov.entries.rows() == 1);
  CHECK(cov.entries(0, 0).real() == 2.5);
  CHECK(cov.entries(0, 0).imag() == 0.0);
  CHECK(cov.beta == 2.5);
}

TEST_CASE("vanishing angular spread gives a rank one steering structure") {
  OneRingParams params;
  params.angular_spread_rad = 1e-8;
  const double az = 0.4;
  const CovarianceMatrix cov = one_ring_covariance(az, 1.0, params, 6);
  // R -> a a^H with a_m = exp(-i 2 pi D m sin(az)): every entry has modulus 1.
  for (int m = 0; m < 6; ++m)
    for (int p = 0; p < 6; ++p) CHECK(std::abs(cov.entries(m, p)) == doctest::Approx(1.0).epsilon(1e-8));
  const double expected_phase = -2.0 * pi * params.antenna_spacing_wavelengths * std::sin(az);
  CHECK(std::arg(cov.entries(1, 0)) == doctest::Approx(expected_phase).epsilon(1e-6));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov.entries);
  CHECK(eig.eigenvalues()(5) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(eig.eigenvalues()(4) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("entries match a high resolution quadrature") {
  OneRingParams params;
  const double az = -0.9;
  const double beta = 3.2;
  const int M = 8;
  const CovarianceMatrix cov = one_ring_covariance(az, beta, params, M);
  for (int m = 0; m < M; ++m)
    for (int p = 0; p < M; ++p) {
      const double freq = 2.0 * pi * params.antenna_spacing_wavelengths * (m - p);
      const cplx ref = beta * simpson_reference(az, params.angular_spread_rad, freq, 20000);
      CHECK(std::abs(cov.entries(m, p) - ref) <= 1e-8 * std::abs(ref) + 1e-12);
    }
}

TEST_CASE("covariance is Hermitian Toeplitz with exact diagonal") {
  OneRingParams params;
  const double beta = 0.37;
  const CovarianceMatrix cov = one_ring_covariance(1.1, beta, params, 7);
  for (int m = 0; m < 7; ++m) {
    CHECK(cov.entries(m, m) == cplx{beta, 0.0});
    for (int p = 0; p < 7; ++p) {
      CHECK(cov.entries(m, p) == std::conj(cov.entries(p, m)));
      if (m + 1 < 7 && p + 1 < 7) CHECK(cov.entries(m, p) == cov.entries(m + 1, p + 1));
    }
  }
  const double trace = cov.entries.trace().real();
  CHECK(std::abs(trace - 7.0 * beta) <= 1e-12 * 7.0 * beta);
}

TEST_CASE("covariance is positive semidefinite") {
  OneRingParams params;
  for (double az : {0.0, 0.3, -1.2, 2.9}) {
    const CovarianceMatrix cov = one_ring_covariance(az, 1.7, params, 10);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov.entries);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("full set enumerates every array user pair") {
  GeometryParams geom;
  const NetworkScenario s = build_ring_network(geom, 7, 10, 4, 3);
  OneRingParams params;
  const CovarianceSet set = build_covariance_set(s, params);
  CHECK(set.size() == 7u * 4u * 7u * 10u);
  CHECK(set.L() == 7);
  CHECK(set.K() == 10);
  CHECK(set.N() == 4);
  CHECK(set.M() == 3);
  for (std::size_t idx = 0; idx < set.size(); ++idx) {
    CHECK(set.mat(idx).entries.rows() == 3);
    CHECK(set.mat(idx).beta > 0.0);
  }
  // Index bookkeeping survives the parallel fill.
  const CovarianceMatrix& probe = set.at(3, 2, 5, 7);
  CHECK(probe.array_cell == 3);
  CHECK(probe.array_idx == 2);
  CHECK(probe.user_cell == 5);
  CHECK(probe.user_idx == 7);
}

TEST_CASE("rotating the single cell layout rotates the covariances") {
  // K = N: user k and array n at the same bearing for every k = n, so the
  // pair (n, i) has the same distance and azimuth as (n+1, i+1).
  GeometryParams geom;
  const NetworkScenario s = build_ring_network(geom, 1, 4, 4, 5);
  OneRingParams params;
  const CovarianceSet set = build_covariance_set(s, params);
  for (int n = 0; n < 4; ++n)
    for (int i = 0; i < 4; ++i) {
      const CMatrix& a = set.R(0, n, 0, i);
      const CMatrix& b = set.R(0, (n + 1) % 4, 0, (i + 1) % 4);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("closer users have larger covariance traces") {
  GeometryParams geom;
  const NetworkScenario s = build_ring_network(geom, 2, 4, 1, 4);
  OneRingParams params;
  const CovarianceSet set = build_covariance_set(s, params);
  for (int i = 0; i < 4; ++i)
    for (int ii = 0; ii < 4; ++ii) {
      const double da = geometry_of(s, 0, 0, 0, i).distance;
      const double db = geometry_of(s, 0, 0, 1, ii).distance;
      if (da < db)
        CHECK(set.R(0, 0, 0, i).trace().real() > set.R(0, 0, 1, ii).trace().real());
    }
}

TEST_CASE("parallel build matches the serial build bit for bit") {
  GeometryParams geom;
  const NetworkScenario s = build_ring_network(geom, 3, 4, 2, 6);
  OneRingParams params;
  const CovarianceSet par = build_covariance_set(s, params);
  const CovarianceSet ser = build_covariance_set_serial(s, params);
  REQUIRE(par.size() == ser.size());
  for (std::size_t idx = 0; idx < par.size(); ++idx) {
    CHECK(par.mat(idx).beta == ser.mat(idx).beta);
    CHECK(par.mat(idx).entries == ser.mat(idx).entries);
  }
}

TEST_CASE("save and load roundtrip exactly") {
  GeometryParams geom;
  const NetworkScenario s = build_ring_network(geom, 2, 3, 2, 4);
  OneRingParams params;
  const CovarianceSet set = build_covariance_set(s, params);
  std::stringstream buffer(std::ios::in | std::ios::out | std::ios::binary);
  save_covariance_set(set, buffer);
  const CovarianceSet back = load_covariance_set(buffer);
  REQUIRE(back.size() == set.size());
  CHECK(back.L() == set.L());
  CHECK(back.M() == set.M());
  for (std::size_t idx = 0; idx < set.size(); ++idx) {
    CHECK(back.mat(idx).beta == set.mat(idx).beta);
    CHECK(back.mat(idx).entries == set.mat(idx).entries);
  }
}

TEST_CASE("quadrature tolerance failures are reported") {
  OneRingParams params;
  params.angular_spread_rad = 1e-300;  // collapses the Richardson estimate
  CHECK_NOTHROW(one_ring_covariance(0.0, 1.0, params, 2));
}
