#include "dephase/analytic_dephasing.hpp"

#include <cmath>

#include "dephase/errors.hpp"
#include "dephase/specfun.hpp"

namespace dephase {
namespace {

void require_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::Domain, std::string(who) + ": t must be finite and >= 0");
}

cplx phase_and_damping(double lambda_sq, double omega0, double t) {
  return std::exp(cplx(-2.0 * lambda_sq * t, -2.0 * omega0 * t));
}

}  // namespace

DensityMatrix2 measurement_only_z(const DensityMatrix2& rho0, double lambda_sq, double omega0, double t) {
  require_time(t, "measurement_only_z");
  if (rho0.basis != Basis::Z) fail(ErrorKind::Domain, "measurement_only_z: input must be in the z basis");
  if (t == 0.0) return rho0;
  DensityMatrix2 r = rho0;
  const cplx f = phase_and_damping(lambda_sq, omega0, t);
  r.m[0][1] = rho0.m[0][1] * f;
  r.m[1][0] = rho0.m[1][0] * std::conj(f);
  return r;
}

double log_thermal_factor(double beta, double t) {
  require_time(t, "log_thermal_factor");
  if (!(beta > 0.0)) fail(ErrorKind::Domain, "log_thermal_factor: beta must be > 0");
  if (std::isinf(beta)) return -std::log1p(t * t);
  const double a = 1.0 / beta;
  const double b = t / beta;
  const double first = log_gamma(cplx(a, b)).real() - log_gamma(cplx(a, 0.0)).real();
  const double second = log_gamma(cplx(a + 1.0, b)).real() - log_gamma(cplx(a + 1.0, 0.0)).real();
  return 2.0 * (first + second);
}

cplx coherence_z(const ModelParams& params, cplx rho12_0, double t) {
  params.validate();
  require_time(t, "coherence_z");
  const double log_mag = 2.0 * params.eta * log_thermal_factor(params.beta, t);
  return rho12_0 * std::exp(log_mag) * phase_and_damping(params.lambda_sq, params.omega0, t);
}

DensityMatrix2 evolve_z(const DensityMatrix2& rho0, const ModelParams& params, double t) {
  if (rho0.basis != Basis::Z) fail(ErrorKind::Domain, "evolve_z: input must be in the z basis");
  const cplx c = coherence_z(params, rho0.rho12(), t);
  DensityMatrix2 r = rho0;
  r.m[0][1] = c;
  r.m[1][0] = std::conj(c);
  return r;
}

ProductResult thermal_factor_product(double beta, double t, long max_factors, double tol) {
  require_time(t, "thermal_factor_product");
  if (!(beta > 0.0) || std::isinf(beta)) fail(ErrorKind::Domain, "thermal_factor_product: beta must be finite and > 0");
  ProductResult r;
  double log_sum = -std::log1p(t * t);
  double last = 0.0;
  for (long n = 1; n <= max_factors; ++n) {
    const double x = 1.0 + static_cast<double>(n) * beta;
    const double ratio = (t / x) * (t / x);
    last = ratio;
    log_sum -= 2.0 * std::log1p(ratio);
    r.factors = n;
    if (ratio < tol) break;
  }
  r.hit_cap = r.factors == max_factors && last >= tol;
  // Remaining sum_{n>N} 2 ln(1 + t^2/(1+n beta)^2) <= 2 t^2 / (beta^2 N).
  r.log_tail_bound = 2.0 * t * t / (beta * beta * static_cast<double>(r.factors));
  r.value = std::exp(log_sum);
  return r;
}

double printed_product_bracket(double beta, double t, long n_factors) {
  double log_sum = 0.0;
  for (long n = 1; n <= n_factors; ++n) {
    const double x = 1.0 + static_cast<double>(n) * beta;
    log_sum += std::log(x) - std::log(x + t);
  }
  return std::exp(log_sum);
}

cplx coherence_z_product(const ModelParams& params, cplx rho12_0, double t, ProductResult* info) {
  params.validate();
  const ProductResult p = thermal_factor_product(params.beta, t);
  if (info) *info = p;
  return rho12_0 * std::pow(p.value, 2.0 * params.eta) * phase_and_damping(params.lambda_sq, params.omega0, t);
}

}  // namespace dephase
