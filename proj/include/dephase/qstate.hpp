#pragma once

#include <array>
#include <complex>
#include <limits>
#include <string_view>

namespace dephase {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

enum class Basis { Z, X };

std::string_view to_string(Basis b);
Basis parse_basis(std::string_view s);

// Units: hbar = 1, omega_c = 1. Times are in 1/omega_c.
struct ModelParams {
  double lambda_sq = 0.0;
  double omega0 = 0.0;
  double eta = 0.0;
  double beta = std::numeric_limits<double>::infinity();

  bool zero_temperature() const { return beta == std::numeric_limits<double>::infinity(); }
  void validate() const;
};

// rho12 = <1|rho|2>. Basis is part of the value.
struct DensityMatrix2 {
  Mat2 m{};
  Basis basis = Basis::Z;

  static DensityMatrix2 from_elements(double rho11, cplx rho12, Basis b);

  double rho11() const { return m[0][0].real(); }
  double rho22() const { return m[1][1].real(); }
  cplx rho12() const { return m[0][1]; }
  cplx rho21() const { return m[1][0]; }
};

struct Validity {
  double trace_error = 0.0;      // |rho11 + rho22 - 1|
  double hermiticity_error = 0.0;  // max(|rho21 - conj(rho12)|, |Im rho11|, |Im rho22|)
  double positivity_deficit = 0.0;  // max(0, |rho12|^2 - rho11 rho22, -rho11, -rho22)
  bool finite = true;

  bool ok(double tol) const {
    return finite && trace_error <= tol && hermiticity_error <= tol && positivity_deficit <= tol;
  }
};

Validity check_state(const DensityMatrix2& rho);

// Conjugation by M = (1/sqrt2)[[1,1],[1,-1]]; identity when target == rho.basis.
DensityMatrix2 change_basis(const DensityMatrix2& rho, Basis target);

// |rho11(tf) - rho11(t0)|. Throws Domain on basis mismatch.
double error_epsilon(const DensityMatrix2& rho_t0, const DensityMatrix2& rho_tf);

}  // namespace dephase
