#pragma once

#include <vector>

#include "dephase/qstate.hpp"

namespace dephase::oracles {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 20;  // bisection depth of the adaptive Gauss-Kronrod rule
  int laguerre_nodes = 128;   // Gauss-Laguerre order for semi-infinite frequency integrals
  double truncation = 40.0;   // upper limit of the adaptive cross-check path, in units of omega_c
};

// eta * int_0^inf u e^{-u} cos(u tau) coth(beta u / 2) du by Gauss-Laguerre.
double kernel_nu(double tau, const ModelParams& params, const QuadratureSpec& spec = {});

// Same integral by adaptive Gauss-Kronrod on [0, spec.truncation].
double kernel_nu_truncated(double tau, const ModelParams& params, const QuadratureSpec& spec = {});

// z-basis coherence under sigma_z measurement from a direct stepper on
// dR/dt = -4 eta R int_0^inf e^{-u} sin(u t) coth(beta u / 2) du, restored with e^{-2 lambda^2 t} e^{-i 2 omega0 t}.
// t_grid must be non-decreasing and start at 0.
std::vector<cplx> ode_coherence_z(const ModelParams& params, const std::vector<double>& t_grid, cplx rho12_0 = 1.0,
                                  const QuadratureSpec& spec = {});

struct IdeOptions {
  double initial_step = 0.02;
  double refinement_tol = 1e-6;  // max relative change between successive step halvings
  int max_halvings = 8;
  double memory_tol = 1e-12;     // Romberg stopping tolerance of the memory integral
  int max_romberg_levels = 14;
};

// z-basis coherence under sigma_x measurement from the time-local memory equation, integrated
// with a fourth-order Magnus stepper and restored through exp(S t).
std::vector<cplx> ide_coherence_x(const ModelParams& params, const std::vector<double>& t_grid, cplx rho12_0,
                                  const QuadratureSpec& spec = {}, const IdeOptions& opts = {});

// 4 int_0^dt dtau int_0^inf e^{-u} sin(u tau) cos(d u dt) du, outer integral by quadrature.
double trace_integral_direct(int d, double dt, const QuadratureSpec& spec = {});

// Gamma(z) = int_0^inf x^{z-1} e^{-x} dx, Re z > 0.
cplx gamma_by_quadrature(cplx z, const QuadratureSpec& spec = {});

// Gamma(s, z) = e^{-z} int_0^inf (z+u)^{s-1} e^{-u} du along the horizontal ray, s in {-1, 0, 1}.
cplx upper_gamma_by_quadrature(int s, cplx z, const QuadratureSpec& spec = {});

// e^{z} Gamma(0, z) = int_0^inf e^{-u} / (u + z) du.
cplx exp_e1_by_quadrature(cplx z, const QuadratureSpec& spec = {});

}  // namespace dephase::oracles
