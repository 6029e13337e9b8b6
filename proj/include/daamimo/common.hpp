#ifndef DAAMIMO_COMMON_HPP
#define DAAMIMO_COMMON_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace daamimo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Seed derivation for reproducible parallel streams. Every stochastic routine
// takes an explicit master seed; the seed of task (a, b) under that master is
// derive_seed(master, a, b). Two splitmix64 rounds decorrelate nearby indices,
// so per-draw/per-point streams are independent of worker count and schedule.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ 0xD1B54A32D192ED03ULL * (a + 1)) + b);
}

// Circularly-symmetric complex standard normal, E[|z|^2] = 1.
// Box-Muller on top of mt19937_64 uniforms; avoids std::normal_distribution,
// whose draw sequence is implementation-defined.
class ComplexNormal {
 public:
  explicit ComplexNormal(std::uint64_t seed) : engine_(seed) {}

  cplx operator()() {
    const double u1 = 1.0 - uniform01();  // (0, 1], log-safe
    const double u2 = uniform01();
    const double r = std::sqrt(-std::log(u1));  // -2*log / 2 for unit variance
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  CVector vector(Eigen::Index m) {
    CVector z(m);
    for (Eigen::Index i = 0; i < m; ++i) z(i) = (*this)();
    return z;
  }

 private:
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  }

  std::mt19937_64 engine_;
};

}  // namespace daamimo

#endif
