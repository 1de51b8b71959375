#include "dephase/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dephase/errors.hpp"

namespace dephase {

std::string_view to_string(Basis b) { return b == Basis::Z ? "z" : "x"; }

Basis parse_basis(std::string_view s) {
  if (s == "z" || s == "Z") return Basis::Z;
  if (s == "x" || s == "X") return Basis::X;
  fail(ErrorKind::Config, "unknown basis '" + std::string(s) + "' (expected z or x)");
}

void ModelParams::validate() const {
  if (!(lambda_sq >= 0.0) || !std::isfinite(lambda_sq)) fail(ErrorKind::Domain, "lambda_sq must be finite and >= 0");
  if (!(omega0 >= 0.0) || !std::isfinite(omega0)) fail(ErrorKind::Domain, "omega0 must be finite and >= 0");
  if (!(eta >= 0.0) || !std::isfinite(eta)) fail(ErrorKind::Domain, "eta must be finite and >= 0");
  if (!(beta > 0.0)) fail(ErrorKind::Domain, "beta must be > 0 (use inf for zero temperature)");
}

DensityMatrix2 DensityMatrix2::from_elements(double rho11, cplx rho12, Basis b) {
  DensityMatrix2 r;
  r.m[0][0] = rho11;
  r.m[1][1] = 1.0 - rho11;
  r.m[0][1] = rho12;
  r.m[1][0] = std::conj(rho12);
  r.basis = b;
  return r;
}

Validity check_state(const DensityMatrix2& rho) {
  Validity v;
  for (const auto& row : rho.m)
    for (const auto& e : row)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) v.finite = false;
  if (!v.finite) return v;
  const double p = rho.m[0][0].real();
  const double q = rho.m[1][1].real();
  v.trace_error = std::abs(p + q - 1.0);
  v.hermiticity_error = std::max({std::abs(rho.m[1][0] - std::conj(rho.m[0][1])), std::abs(rho.m[0][0].imag()),
                                  std::abs(rho.m[1][1].imag())});
  v.positivity_deficit = std::max({0.0, std::norm(rho.m[0][1]) - p * q, -p, -q});
  return v;
}

DensityMatrix2 change_basis(const DensityMatrix2& rho, Basis target) {
  if (target == rho.basis) return rho;
  const cplx a = rho.m[0][0], b = rho.m[0][1], c = rho.m[1][0], d = rho.m[1][1];
  DensityMatrix2 r;
  r.m[0][0] = 0.5 * ((a + d) + (b + c));
  r.m[0][1] = 0.5 * ((a - d) - (b - c));
  r.m[1][0] = 0.5 * ((a - d) + (b - c));
  r.m[1][1] = 0.5 * ((a + d) - (b + c));
  r.basis = target;
  return r;
}

double error_epsilon(const DensityMatrix2& rho_t0, const DensityMatrix2& rho_tf) {
  if (rho_t0.basis != rho_tf.basis) fail(ErrorKind::Domain, "error_epsilon: basis mismatch");
  return std::abs(rho_tf.rho11() - rho_t0.rho11());
}

}  // namespace dephase
