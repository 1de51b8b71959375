#pragma once

#include "dephase/qstate.hpp"

namespace dephase {

// sigma_z measurement only: rho12 -> rho12 e^{-2 lambda^2 t} e^{-i 2 omega0 t}; populations fixed.
DensityMatrix2 measurement_only_z(const DensityMatrix2& rho0, double lambda_sq, double omega0, double t);

// ln F(t), F = |Gamma(a+ib)|^2/Gamma(a)^2 * |Gamma(a+1+ib)|^2/Gamma(a+1)^2, a = 1/beta, b = t/beta.
// Zero temperature: F = 1/(1 + t^2).
double log_thermal_factor(double beta, double t);

// rho12(0) F(t)^{2 eta} e^{-2 lambda^2 t} e^{-i 2 omega0 t}.
cplx coherence_z(const ModelParams& params, cplx rho12_0, double t);

DensityMatrix2 evolve_z(const DensityMatrix2& rho0, const ModelParams& params, double t);

struct ProductResult {
  double value = 1.0;
  long factors = 0;
  bool hit_cap = false;
  double log_tail_bound = 0.0;  // upper bound on |ln(exact) - ln(value)|
};

// F(t) = (1+t^2)^{-1} * [prod_{n>=1} (1+n beta)^2 / ((1+n beta)^2 + t^2)]^2, truncated once a
// factor differs from 1 by less than tol or after max_factors factors. Finite beta only.
ProductResult thermal_factor_product(double beta, double t, long max_factors = 1'000'000, double tol = 1e-10);

// Literal bracket prod_{n=1}^{n_factors} (1+n beta)/(1+n beta+t). Tends to 0 as n_factors grows.
double printed_product_bracket(double beta, double t, long n_factors);

// Coherence through thermal_factor_product; cross-check path only.
cplx coherence_z_product(const ModelParams& params, cplx rho12_0, double t, ProductResult* info = nullptr);

}  // namespace dephase
