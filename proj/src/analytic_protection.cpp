#include "dephase/analytic_protection.hpp"

#include <cmath>

#include "dephase/analytic_dephasing.hpp"
#include "dephase/errors.hpp"
#include "dephase/specfun.hpp"

namespace dephase {
namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kSeriesRadius = 1e-4;

// e^{-lambda^2 t} cosh(Omega t) and e^{-lambda^2 t} sinh(Omega t)/Omega without intermediate overflow.
struct DampedHyperbolic {
  cplx ch;
  cplx sh_over_omega;
};

DampedHyperbolic damped_hyperbolic(cplx omega, double lambda_sq, double t) {
  const cplx up = std::exp((omega - lambda_sq) * t);
  const cplx down = std::exp(-(omega + lambda_sq) * t);
  DampedHyperbolic d;
  d.ch = 0.5 * (up + down);
  const cplx x = omega * t;
  if (std::abs(x) < kSeriesRadius) {
    const cplx x2 = x * x;
    d.sh_over_omega = std::exp(-lambda_sq * t) * t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
  } else {
    d.sh_over_omega = 0.5 * (up - down) / omega;
  }
  return d;
}

void require_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::Domain, std::string(who) + ": t must be finite and >= 0");
}

void require_zero_T_regime(const ModelParams& p) {
  p.validate();
  if (!p.zero_temperature())
    fail(ErrorKind::UnsupportedRegime, "analytic sigma_x solution exists only at zero temperature (beta = inf)");
  if (p.omega0 != 0.0) fail(ErrorKind::UnsupportedRegime, "analytic sigma_x solution requires omega0 = 0");
}

}  // namespace

cplx lindblad_x_omega(double lambda_sq, double omega0) {
  return std::sqrt(cplx(lambda_sq * lambda_sq - 4.0 * omega0 * omega0, 0.0));
}

Mat2 lindblad_x_propagate(const Mat2& x, double lambda_sq, double omega0, double t) {
  const cplx omega = lindblad_x_omega(lambda_sq, omega0);
  const DampedHyperbolic d = damped_hyperbolic(omega, lambda_sq, t);
  const cplx sum = 0.5 * (x[0][0] + x[1][1]);
  const cplx diff = 0.5 * (x[0][0] - x[1][1]) * std::exp(-2.0 * lambda_sq * t);
  const cplx w = 2.0 * omega0 * kI;
  Mat2 s;
  s[0][0] = sum + diff;
  s[1][1] = sum - diff;
  s[0][1] = d.ch * x[0][1] + d.sh_over_omega * (-w * x[0][1] + lambda_sq * x[1][0]);
  s[1][0] = d.ch * x[1][0] + d.sh_over_omega * (w * x[1][0] + lambda_sq * x[0][1]);
  return s;
}

DensityMatrix2 evolve_x_measurement_only(const DensityMatrix2& rho0, double lambda_sq, double omega0, double t,
                                         Basis out) {
  if (rho0.basis != Basis::Z) fail(ErrorKind::Domain, "evolve_x_measurement_only: input must be in the z basis");
  const double decay = std::exp(-2.0 * lambda_sq * t);
  const double half_diff = (2.0 * rho0.rho11() - 1.0) / 2.0;
  const cplx a = rho0.rho12();
  if (out == Basis::Z) {
    const Mat2 s = lindblad_x_propagate(rho0.m, lambda_sq, omega0, t);
    DensityMatrix2 r = DensityMatrix2::from_elements(0.5 + half_diff * decay, s[0][1], Basis::Z);
    return r;
  }
  const cplx omega = lindblad_x_omega(lambda_sq, omega0);
  const DampedHyperbolic d = damped_hyperbolic(omega, lambda_sq, t);
  const double ch = d.ch.real();
  const double sh = d.sh_over_omega.real();
  const double rho11_x = 0.5 + ch * a.real() + 2.0 * omega0 * sh * a.imag() + lambda_sq * sh * a.real();
  const double im_part = ch * a.imag() - 2.0 * omega0 * sh * a.real() - lambda_sq * sh * a.imag();
  return DensityMatrix2::from_elements(rho11_x, cplx(half_diff * decay, -im_part), Basis::X);
}

QKernels q_kernels(double lambda_sq, double omega0, double t, double t_prime) {
  if (!(t_prime >= 0.0) || !(t_prime <= t)) fail(ErrorKind::Domain, "q_kernels: requires 0 <= t_prime <= t");
  const cplx omega = lindblad_x_omega(lambda_sq, omega0);
  auto k1 = [&](double s) { return omega * std::cosh(omega * s) + 2.0 * omega0 * kI * std::sinh(omega * s); };
  auto k2 = [&](double s) { return lambda_sq * std::sinh(omega * s); };
  const double u = t - t_prime;
  const cplx k1t = k1(t), k2t = k2(t);
  const cplx k1u = k1(u), k2u = k2(u);
  const cplx k1p = k1(t_prime), k2p = k2(t_prime);
  QKernels q;
  q.q1 = k1t * (std::conj(k1u) * std::conj(k1p) - k2u * k2p) + k2t * (k2u * std::conj(k1p) - k1u * k2p);
  q.q2 = k1t * (std::conj(k1u) * k2p - k2u * k1p) + k2t * (k2u * k2p - k1u * k1p);
  return q;
}

GammaIntegrals gamma_integrals(double lambda_sq, double t) {
  if (!(lambda_sq > 0.0) || !std::isfinite(lambda_sq))
    fail(ErrorKind::Domain, "gamma_integrals: lambda_sq must be > 0");
  require_time(t, "gamma_integrals");
  const double l = lambda_sq;
  const cplx iz(0.0, 2.0 * l);
  const cplx w = 2.0 * l * t + iz;
  const cplx ep = std::exp(iz);
  const cplx em = std::exp(-iz);
  auto G = [](int s, cplx z) { return upper_gamma(s, z); };

  const cplx g0w = G(0, w), g0mw = G(0, -w);
  const cplx gm1w = G(-1, w), gm1mw = G(-1, -w);
  const cplx g1w = G(1, w), g1mw = G(1, -w);

  GammaIntegrals r;
  r.g0 = (ep * G(0, iz)).real();
  r.g1 = (std::exp(w) * g0w + std::exp(-w) * g0mw).real();
  r.g2 = (std::exp(w) * gm1w - std::exp(-w) * gm1mw).real();

  r.c1 = -1.0 / (2.0 * l) * (iz * G(0, -iz) + G(1, -iz));
  r.c2 = -1.0 / (2.0 * l) * (iz * G(-1, -iz) + G(0, -iz));
  r.c3 = -1.0 / (4.0 * l) * (G(0, iz) - std::exp(-2.0 * iz) * G(0, -iz));
  r.c4 = -1.0 / (4.0 * l) * (G(-1, iz) + std::exp(-2.0 * iz) * G(-1, -iz));

  const double e4p = std::exp(4.0 * l * t);
  const double e4m = std::exp(-4.0 * l * t);
  const cplx ei4p = std::exp(2.0 * iz);
  const cplx ei4m = std::exp(-2.0 * iz);

  r.a_plus = (1.0 / (4.0 * l)) * (ep * (e4p * g0w - ei4m * g0mw)).real() +
             (1.0 / (2.0 * l)) * (em * (iz * g0mw + g1mw)).real() + t * (em * g0mw).real() +
             (em * r.c1 + ep * r.c3).real();
  r.a_minus = -(1.0 / (4.0 * l)) * (em * (e4m * g0mw - ei4p * g0w)).real() +
              (1.0 / (2.0 * l)) * (ep * (iz * g0w - g1w)).real() + t * (ep * g0w).real() -
              (ep * std::conj(r.c1) + em * std::conj(r.c3)).real();
  r.b_plus = (1.0 / (4.0 * l)) * (ep * (e4p * gm1w + ei4m * gm1mw)).real() -
             (1.0 / (2.0 * l)) * (em * (iz * gm1mw + g0mw)).real() - t * (em * gm1mw).real() -
             (em * r.c2 - ep * r.c4).real();
  r.b_minus = (1.0 / (4.0 * l)) * (em * (e4m * gm1mw + ei4p * gm1w)).real() +
              (1.0 / (2.0 * l)) * (ep * (iz * gm1w - g0w)).real() + t * (ep * gm1w).real() -
              (ep * std::conj(r.c2) - em * std::conj(r.c4)).real();
  return r;
}

ChannelExponents x_channel_exponents(const ModelParams& params, double t) {
  require_zero_T_regime(params);
  require_time(t, "x_channel_exponents");
  const double l = params.lambda_sq;
  if (l == 0.0) {
    const double e = 2.0 * params.eta * log_thermal_factor(params.beta, t);
    return {e, e};
  }
  const double k = 4.0 * params.eta * l;
  const GammaIntegrals gi = gamma_integrals(l, t);
  return {-2.0 * k * gi.g0 * t + k * (gi.a_minus - gi.b_minus),
          -2.0 * l * t + 2.0 * k * gi.g0 * t - k * (gi.a_plus + gi.b_plus)};
}

cplx coherence_x_zero_T(cplx rho12_0, const ModelParams& params, double t) {
  require_zero_T_regime(params);
  require_time(t, "coherence_x_zero_T");
  if (params.lambda_sq == 0.0) return coherence_z(params, rho12_0, t);
  const ChannelExponents e = x_channel_exponents(params, t);
  const double re = rho12_0.real() == 0.0 ? 0.0 : rho12_0.real() * std::exp(e.re);
  const double im = rho12_0.imag() == 0.0 ? 0.0 : rho12_0.imag() * std::exp(e.im);
  if (!std::isfinite(re) || !std::isfinite(im))
    fail(ErrorKind::Numerical, "coherence_x_zero_T: exponent overflow at t = " + std::to_string(t) +
                                   " (re exponent " + std::to_string(e.re) + ", im exponent " +
                                   std::to_string(e.im) + ")");
  return {re, im};
}

DensityMatrix2 evolve_x_zero_T(const DensityMatrix2& rho0, const ModelParams& params, double t) {
  if (rho0.basis != Basis::Z) fail(ErrorKind::Domain, "evolve_x_zero_T: input must be in the z basis");
  const cplx a = rho0.rho12();
  const ChannelExponents e = x_channel_exponents(params, t);
  // Each channel is a single exponential; an overflowing one becomes +-inf and leaves the other intact.
  const double re = a.real() == 0.0 ? 0.0 : a.real() * std::exp(e.re);
  const double im = a.imag() == 0.0 ? 0.0 : a.imag() * std::exp(e.im);
  const double half_diff = (2.0 * rho0.rho11() - 1.0) / 2.0;
  return DensityMatrix2::from_elements(0.5 + re, cplx(half_diff * std::exp(-2.0 * params.lambda_sq * t), -im),
                                       Basis::X);
}

}  // namespace dephase
