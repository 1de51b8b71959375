#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "dephase/qstate.hpp"

namespace testsupport {

using dephase::cplx;

// Seeded generators for property tests; every case is reproducible from its seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Uniform over the Bloch ball: direction uniform on the sphere, radius^3 uniform.
  dephase::DensityMatrix2 state(dephase::Basis b = dephase::Basis::Z) {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * M_PI);
    const double r = std::cbrt(uniform(0.0, 1.0));
    const double s = std::sqrt(1.0 - z * z);
    const double x = r * s * std::cos(phi), y = r * s * std::sin(phi);
    return dephase::DensityMatrix2::from_elements(0.5 * (1.0 + r * z), cplx(0.5 * x, -0.5 * y), b);
  }

  // Pure states sit on the positivity boundary.
  dephase::DensityMatrix2 pure_state(dephase::Basis b = dephase::Basis::Z) {
    const double theta = std::acos(uniform(-1.0, 1.0));
    const double phi = uniform(0.0, 2.0 * M_PI);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return dephase::DensityMatrix2::from_elements(c * c, c * s * std::exp(cplx(0.0, -phi)), b);
  }

  cplx complex_in_annulus(double rmin, double rmax, double max_arg) {
    const double r = std::exp(uniform(std::log(rmin), std::log(rmax)));
    return std::polar(r, uniform(-max_arg, max_arg));
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(cplx a, cplx b) {
  const double s = std::abs(b);
  return s == 0.0 ? std::abs(a) : std::abs(a - b) / s;
}

inline double rel_err(double a, double b) {
  const double s = std::abs(b);
  return s == 0.0 ? std::abs(a) : std::abs(a - b) / s;
}

// rho11 of (|1> + e^{i pi/4}|2>)/sqrt2 seen in the x basis.
inline constexpr double kPhaseStateRho11X = 0.8535533906;

inline dephase::DensityMatrix2 phase_state() {
  return dephase::DensityMatrix2::from_elements(0.5, 0.5 * std::exp(cplx(0.0, -M_PI / 4.0)), dephase::Basis::Z);
}

}  // namespace testsupport

namespace testsupport {

// 10 magnitudes log-spaced on [0.01, 100] times 10 arguments -pi + (k + 1/2) 2pi/10.
inline std::vector<cplx> incomplete_gamma_grid() {
  std::vector<cplx> g;
  for (int i = 0; i < 10; ++i) {
    const double r = std::pow(10.0, -2.0 + 4.0 * i / 9.0);
    for (int k = 0; k < 10; ++k) g.push_back(std::polar(r, -M_PI + (k + 0.5) * 2.0 * M_PI / 10.0));
  }
  return g;
}

// 10 x 10 points with Re z in [0.5, 10] and Im z in [-4, 4].
inline std::vector<cplx> log_gamma_grid() {
  std::vector<cplx> g;
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 10; ++k) g.emplace_back(0.5 + 9.5 * i / 9.0, -4.0 + 8.0 * k / 9.0);
  return g;
}

}  // namespace testsupport
