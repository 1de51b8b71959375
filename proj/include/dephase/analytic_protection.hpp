#pragma once

#include "dephase/qstate.hpp"

namespace dephase {

// Omega = sqrt(lambda^4 - 4 omega0^2) on the principal branch (imaginary when lambda^4 < 4 omega0^2).
cplx lindblad_x_omega(double lambda_sq, double omega0);

// Action of the sigma_x measurement-only generator exp(S t) on an arbitrary 2x2 operator.
// Negative t applies the inverse map.
Mat2 lindblad_x_propagate(const Mat2& x, double lambda_sq, double omega0, double t);

// sigma_x measurement only, input in the z basis. Output basis X uses the direct x-basis formula.
DensityMatrix2 evolve_x_measurement_only(const DensityMatrix2& rho0, double lambda_sq, double omega0, double t,
                                         Basis out = Basis::Z);

struct QKernels {
  cplx q1;
  cplx q2;
};

// Memory kernels of the sigma_x coherence equation; requires 0 <= t_prime <= t.
QKernels q_kernels(double lambda_sq, double omega0, double t, double t_prime);

struct GammaIntegrals {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double a_plus = 0.0;   // int_0^t e^{+2 lambda^2 s} g1(s) ds
  double a_minus = 0.0;  // int_0^t e^{-2 lambda^2 s} g1(s) ds
  double b_plus = 0.0;   // int_0^t e^{+2 lambda^2 s} g2(s) ds
  double b_minus = 0.0;  // int_0^t e^{-2 lambda^2 s} g2(s) ds
  cplx c1, c2, c3, c4;
};

// Zero temperature, omega0 = 0 building blocks. Throws Domain when lambda_sq <= 0.
GammaIntegrals gamma_integrals(double lambda_sq, double t);

// Logarithms of the Re and Im channel factors of the zero-temperature, omega0 = 0 coherence:
// Re rho12(t) = Re rho12(0) e^{re}, Im rho12(t) = Im rho12(0) e^{im}.
struct ChannelExponents {
  double re = 0.0;
  double im = 0.0;
};

ChannelExponents x_channel_exponents(const ModelParams& params, double t);

// rho12 in the z basis at T = 0, omega0 = 0. lambda = 0 falls back to pure dephasing.
// Throws UnsupportedRegime for finite beta or omega0 != 0, Numerical if an exponent overflows.
cplx coherence_x_zero_T(cplx rho12_0, const ModelParams& params, double t);

// Same regime; result in the x basis. rho11 comes from the Re channel alone, so it stays finite when
// the Im channel overflows; that channel is then returned as +-inf and check_state reports it.
DensityMatrix2 evolve_x_zero_T(const DensityMatrix2& rho0, const ModelParams& params, double t);

}  // namespace dephase
