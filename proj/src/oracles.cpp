#include "dephase/oracles.hpp"

#include <gsl/gsl_integration.h>

#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "dephase/errors.hpp"

namespace dephase::oracles {
namespace {

constexpr cplx kI(0.0, 1.0);

struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const LaguerreRule& laguerre_rule(int n) {
  static std::mutex mu;
  static std::map<int, LaguerreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_fixed_workspace* w =
      gsl_integration_fixed_alloc(gsl_integration_fixed_laguerre, static_cast<std::size_t>(n), 0.0, 1.0, 0.0, 0.0);
  if (!w) fail(ErrorKind::Numerical, "laguerre_rule: GSL allocation failed");
  LaguerreRule r;
  const double* x = gsl_integration_fixed_nodes(w);
  const double* q = gsl_integration_fixed_weights(w);
  r.nodes.assign(x, x + n);
  r.weights.assign(q, q + n);
  gsl_integration_fixed_free(w);
  return cache.emplace(n, std::move(r)).first->second;
}

// int_0^inf e^{-u} f(u) du
template <class F>
double laguerre(F f, const QuadratureSpec& spec) {
  if (spec.laguerre_nodes < 2) fail(ErrorKind::Domain, "QuadratureSpec: laguerre_nodes must be >= 2");
  const LaguerreRule& r = laguerre_rule(spec.laguerre_nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

template <class F>
double adaptive(F f, double a, double b, const QuadratureSpec& spec, const char* who) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, static_cast<unsigned>(spec.max_subdivisions), spec.rel_tol, &err, &l1);
  if (!std::isfinite(v) || err > std::max(spec.rel_tol * l1, spec.abs_tol) * 10.0)
    fail(ErrorKind::Numerical, std::string(who) + ": quadrature did not converge (estimate " + std::to_string(v) +
                                   ", error " + std::to_string(err) + ")");
  return v;
}

template <class F>
double semi_infinite(F f, double a, const QuadratureSpec& spec, const char* who) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), spec.rel_tol, &err, &l1);
  if (!std::isfinite(v) || err > std::max(spec.rel_tol * l1, spec.abs_tol) * 10.0)
    fail(ErrorKind::Numerical, std::string(who) + ": quadrature did not converge (estimate " + std::to_string(v) +
                                   ", error " + std::to_string(err) + ")");
  return v;
}

// coth(beta u / 2), with the zero-temperature limit 1.
double thermal(double u, double beta) {
  if (std::isinf(beta)) return 1.0;
  return 1.0 / std::tanh(0.5 * beta * u);
}

// u coth(beta u / 2) is finite at u = 0.
double u_thermal(double u, double beta) {
  if (std::isinf(beta)) return u;
  if (u == 0.0) return 2.0 / beta;
  return u / std::tanh(0.5 * beta * u);
}

void require_grid(const std::vector<double>& g, const char* who) {
  if (g.empty() || g.front() != 0.0) fail(ErrorKind::Domain, std::string(who) + ": time grid must start at 0");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] >= g[i - 1]) || !std::isfinite(g[i]))
      fail(ErrorKind::Domain, std::string(who) + ": time grid must be non-decreasing");
}

// 2x2 complex matrix helpers for the Magnus stepper.
using M2 = std::array<cplx, 4>;  // row-major

M2 mat_add(const M2& a, const M2& b, cplx sb = 1.0) { return {a[0] + sb * b[0], a[1] + sb * b[1], a[2] + sb * b[2], a[3] + sb * b[3]}; }
M2 mat_mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// exp(M) via M = s I + N, N^2 = delta I.
M2 mat_exp(const M2& m) {
  const cplx s = 0.5 * (m[0] + m[3]);
  const M2 n{m[0] - s, m[1], m[2], m[3] - s};
  const cplx delta = n[0] * n[0] + n[1] * n[2];
  const cplx r = std::sqrt(delta);
  cplx c, sh;
  if (std::abs(r) < 1e-4) {
    c = 1.0 + delta / 2.0 + delta * delta / 24.0;
    sh = 1.0 + delta / 6.0 + delta * delta / 120.0;
  } else {
    c = std::cosh(r);
    sh = std::sinh(r) / r;
  }
  const cplx e = std::exp(s);
  return {e * (c + sh * n[0]), e * sh * n[1], e * sh * n[2], e * (c + sh * n[3])};
}

// Kernels of the sigma_x memory term divided by Omega: k1 = K1/Omega, k2 = K2/Omega.
struct ScaledKernels {
  cplx omega;
  double lambda_sq;
  double omega0;
  cplx phase;  // conj(Omega)/Omega, 1 at Omega = 0

  cplx sh(double s) const {
    const cplx x = omega * s;
    if (std::abs(x) < 1e-4) {
      const cplx x2 = x * x;
      return s * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    }
    return std::sinh(x) / omega;
  }
  cplx k1(double s) const { return std::cosh(omega * s) + 2.0 * omega0 * kI * sh(s); }
  cplx k2(double s) const { return lambda_sq * sh(s); }

  // (Q1, Q2) / Omega^3 at (t, t - tau).
  std::pair<cplx, cplx> q_over_omega3(double t, double tau) const {
    const double tp = t - tau;
    const cplx k1t = k1(t), k2t = k2(t), k1u = k1(tau), k2u = k2(tau), k1p = k1(tp), k2p = k2(tp);
    const cplx q1 = k1t * (phase * phase * std::conj(k1u) * std::conj(k1p) - k2u * k2p) +
                    k2t * (phase * k2u * std::conj(k1p) - k1u * k2p);
    const cplx q2 = k1t * (phase * std::conj(k1u) * k2p - k2u * k1p) + k2t * (k2u * k2p - k1u * k1p);
    return {q1, q2};
  }
};

// Romberg extrapolation of the composite trapezoid rule for int_0^t nu(tau) Q(t, t - tau) dtau.
std::pair<cplx, cplx> memory_integral(const ScaledKernels& sk, const ModelParams& params, double t,
                                      const QuadratureSpec& spec, const IdeOptions& opts) {
  if (t == 0.0) return {0.0, 0.0};
  auto f = [&](double tau) {
    const double nu = kernel_nu(tau, params, spec);
    const auto q = sk.q_over_omega3(t, tau);
    return std::pair<cplx, cplx>{nu * q.first, nu * q.second};
  };
  const int levels = opts.max_romberg_levels;
  std::vector<std::array<cplx, 2>> prev, cur;
  const auto fa = f(0.0), fb = f(t);
  double h = t;
  cur.push_back({0.5 * h * (fa.first + fb.first), 0.5 * h * (fa.second + fb.second)});
  for (int k = 1; k < levels; ++k) {
    prev = cur;
    cur.assign(static_cast<std::size_t>(k) + 1, {cplx(0.0), cplx(0.0)});
    h *= 0.5;
    const long n_new = 1L << (k - 1);
    std::array<cplx, 2> mid{0.0, 0.0};
    for (long j = 0; j < n_new; ++j) {
      const auto v = f(h * static_cast<double>(2 * j + 1));
      mid[0] += v.first;
      mid[1] += v.second;
    }
    cur[0] = {0.5 * prev[0][0] + h * mid[0], 0.5 * prev[0][1] + h * mid[1]};
    double pow4 = 1.0;
    for (int m = 1; m <= k; ++m) {
      pow4 *= 4.0;
      for (int c = 0; c < 2; ++c) cur[m][c] = cur[m - 1][c] + (cur[m - 1][c] - prev[m - 1][c]) / (pow4 - 1.0);
    }
    if (k >= 4) {
      const double scale = std::max({std::abs(cur[k][0]), std::abs(cur[k][1]), 1e-300});
      const double change = std::max(std::abs(cur[k][0] - prev[k - 1][0]), std::abs(cur[k][1] - prev[k - 1][1]));
      if (change <= opts.memory_tol * scale) return {cur[k][0], cur[k][1]};
    }
  }
  fail(ErrorKind::Numerical, "ide_coherence_x: memory integral did not converge at t = " + std::to_string(t));
}

// Generator A(t) of d(r12, r21)/dt = A(t) (r12, r21).
M2 generator(const ScaledKernels& sk, const ModelParams& params, double t, const QuadratureSpec& spec,
             const IdeOptions& opts) {
  const auto c = memory_integral(sk, params, t, spec, opts);
  return {-4.0 * c.first, -4.0 * c.second, -4.0 * std::conj(c.second), -4.0 * std::conj(c.first)};
}

std::vector<std::array<cplx, 2>> magnus_trajectory(const ScaledKernels& sk, const ModelParams& params,
                                                   const std::vector<double>& grid, cplx r0, double h_max,
                                                   const QuadratureSpec& spec, const IdeOptions& opts) {
  static const double kGauss = std::sqrt(3.0) / 6.0;
  std::vector<std::array<cplx, 2>> out(grid.size());
  std::array<cplx, 2> r{r0, std::conj(r0)};
  out[0] = r;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    const long steps = span > 0.0 ? static_cast<long>(std::ceil(span / h_max - 1e-12)) : 0;
    const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (long s = 0; s < steps; ++s) {
      const double t0 = grid[i - 1] + h * static_cast<double>(s);
      const M2 a1 = generator(sk, params, t0 + (0.5 - kGauss) * h, spec, opts);
      const M2 a2 = generator(sk, params, t0 + (0.5 + kGauss) * h, spec, opts);
      const M2 comm = mat_add(mat_mul(a2, a1), mat_mul(a1, a2), -1.0);
      M2 omega = mat_add(a1, a2);
      for (auto& e : omega) e *= 0.5 * h;
      omega = mat_add(omega, comm, std::sqrt(3.0) / 12.0 * h * h);
      const M2 e = mat_exp(omega);
      r = {e[0] * r[0] + e[1] * r[1], e[2] * r[0] + e[3] * r[1]};
      if (!std::isfinite(std::abs(r[0])) || !std::isfinite(std::abs(r[1])))
        fail(ErrorKind::Numerical, "ide_coherence_x: state overflow near t = " + std::to_string(t0));
    }
    out[i] = r;
  }
  return out;
}

}  // namespace

double kernel_nu(double tau, const ModelParams& params, const QuadratureSpec& spec) {
  params.validate();
  if (!(tau >= 0.0)) fail(ErrorKind::Domain, "kernel_nu: tau must be >= 0");
  if (params.eta == 0.0) return 0.0;
  return params.eta * laguerre([&](double u) { return u_thermal(u, params.beta) * std::cos(u * tau); }, spec);
}

double kernel_nu_truncated(double tau, const ModelParams& params, const QuadratureSpec& spec) {
  params.validate();
  if (!(tau >= 0.0)) fail(ErrorKind::Domain, "kernel_nu_truncated: tau must be >= 0");
  if (params.eta == 0.0) return 0.0;
  auto f = [&](double u) { return std::exp(-u) * u_thermal(u, params.beta) * std::cos(u * tau); };
  return params.eta * adaptive(f, 0.0, spec.truncation, spec, "kernel_nu_truncated");
}

std::vector<cplx> ode_coherence_z(const ModelParams& params, const std::vector<double>& t_grid, cplx rho12_0,
                                  const QuadratureSpec& spec) {
  namespace ode = boost::numeric::odeint;
  params.validate();
  require_grid(t_grid, "ode_coherence_z");
  using State = std::array<double, 2>;
  auto decay_rate = [&](double t) {
    if (params.eta == 0.0) return 0.0;
    return 4.0 * params.eta * laguerre([&](double u) { return std::sin(u * t) * thermal(u, params.beta); }, spec);
  };
  auto rhs = [&](const State& x, State& dx, double t) {
    const double k = decay_rate(t);
    dx[0] = -k * x[0];
    dx[1] = -k * x[1];
  };
  auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
  State x{rho12_0.real(), rho12_0.imag()};
  std::vector<cplx> out(t_grid.size());
  out[0] = rho12_0;
  try {
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double a = t_grid[i - 1], b = t_grid[i];
      if (b > a) ode::integrate_adaptive(stepper, rhs, x, a, b, std::min(1e-3, b - a));
      const double t = b;
      out[i] = cplx(x[0], x[1]) * std::exp(cplx(-2.0 * params.lambda_sq * t, -2.0 * params.omega0 * t));
    }
  } catch (const std::exception& e) {
    fail(ErrorKind::Numerical, std::string("ode_coherence_z: stepper failure: ") + e.what());
  }
  return out;
}

std::vector<cplx> ide_coherence_x(const ModelParams& params, const std::vector<double>& t_grid, cplx rho12_0,
                                  const QuadratureSpec& spec, const IdeOptions& opts) {
  params.validate();
  require_grid(t_grid, "ide_coherence_x");
  ScaledKernels sk;
  sk.lambda_sq = params.lambda_sq;
  sk.omega0 = params.omega0;
  sk.omega = std::sqrt(cplx(params.lambda_sq * params.lambda_sq - 4.0 * params.omega0 * params.omega0, 0.0));
  sk.phase = std::abs(sk.omega) == 0.0 ? cplx(1.0) : std::conj(sk.omega) / sk.omega;

  double h = opts.initial_step;
  auto coarse = magnus_trajectory(sk, params, t_grid, rho12_0, h, spec, opts);
  bool converged = params.eta == 0.0;
  for (int k = 0; k < opts.max_halvings && !converged; ++k) {
    h *= 0.5;
    auto fine = magnus_trajectory(sk, params, t_grid, rho12_0, h, spec, opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const double scale = std::max(std::abs(fine[i][0]), 1e-300);
      worst = std::max(worst, std::abs(fine[i][0] - coarse[i][0]) / scale);
    }
    coarse = std::move(fine);
    converged = worst < opts.refinement_tol;
  }
  if (!converged) fail(ErrorKind::Numerical, "ide_coherence_x: step halving did not reach the refinement tolerance");

  // rho_S = exp(S t) R, off-diagonal part.
  std::vector<cplx> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const cplx r12 = coarse[i][0], r21 = coarse[i][1];
    const cplx damp = std::exp(-params.lambda_sq * t);
    out[i] = damp * (std::cosh(sk.omega * t) * r12 + sk.sh(t) * (-2.0 * params.omega0 * kI * r12 + params.lambda_sq * r21));
  }
  return out;
}

double trace_integral_direct(int d, double dt, const QuadratureSpec& spec) {
  if (d < 0) fail(ErrorKind::Domain, "trace_integral_direct: d must be >= 0");
  if (!(dt > 0.0)) fail(ErrorKind::Domain, "trace_integral_direct: dt must be > 0");
  const double c = static_cast<double>(d) * dt;
  // int_0^inf e^{-u} sin(u tau) cos(u c) du = [(tau+c)/(1+(tau+c)^2) + (tau-c)/(1+(tau-c)^2)] / 2
  auto inner = [c](double tau) {
    const double p = tau + c, m = tau - c;
    return 0.5 * (p / (1.0 + p * p) + m / (1.0 + m * m));
  };
  return 4.0 * adaptive(inner, 0.0, dt, spec, "trace_integral_direct");
}

cplx gamma_by_quadrature(cplx z, const QuadratureSpec& spec) {
  if (!(z.real() > 0.0)) fail(ErrorKind::Domain, "gamma_by_quadrature: requires Re z > 0");
  // x^{z-1} e^{-x} as one exponential so the far tail underflows to 0 instead of inf * 0.
  auto f = [z](double x) {
    if (x == 0.0) return cplx(0.0, 0.0);
    const cplx e = (z - 1.0) * std::log(x) - x;
    return e.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(e);
  };
  auto re = [&f](double x) { return f(x).real(); };
  auto im = [&f](double x) { return f(x).imag(); };
  // Split at 1 so the exp-sinh rule sees only the decaying tail.
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0, l1 = 0.0;
  const double re_head = ts.integrate(re, 0.0, 1.0, spec.rel_tol, &err, &l1);
  const double im_head = ts.integrate(im, 0.0, 1.0, spec.rel_tol, &err, &l1);
  const double re_tail = semi_infinite(re, 1.0, spec, "gamma_by_quadrature");
  const double im_tail = semi_infinite(im, 1.0, spec, "gamma_by_quadrature");
  return {re_head + re_tail, im_head + im_tail};
}

namespace {

// int_0^inf (z+u)^{s-1} e^{-u} du along the horizontal ray from z.
cplx ray_integral(int s, cplx z, const QuadratureSpec& spec) {
  auto g = [z, s](double u) { return std::pow(z + u, static_cast<double>(s - 1)) * std::exp(-u); };
  auto re = [&](double u) { return g(u).real(); };
  auto im = [&](double u) { return g(u).imag(); };
  // Near-pole at u = -Re z when z sits close to the negative axis: integrate up to it adaptively.
  const double knee = std::max(0.0, -z.real());
  double re_v = 0.0, im_v = 0.0;
  if (knee > 0.0) {
    re_v += adaptive(re, 0.0, knee, spec, "ray_integral");
    im_v += adaptive(im, 0.0, knee, spec, "ray_integral");
  }
  const double mid = knee + 1.0;
  re_v += adaptive(re, knee, mid, spec, "ray_integral");
  im_v += adaptive(im, knee, mid, spec, "ray_integral");
  re_v += semi_infinite(re, mid, spec, "ray_integral");
  im_v += semi_infinite(im, mid, spec, "ray_integral");
  return {re_v, im_v};
}

void require_off_cut(cplx z, const char* who) {
  if (z.imag() == 0.0 && z.real() <= 0.0) fail(ErrorKind::Domain, std::string(who) + ": z on the cut");
}

}  // namespace

cplx upper_gamma_by_quadrature(int s, cplx z, const QuadratureSpec& spec) {
  if (s < -1 || s > 1) fail(ErrorKind::Domain, "upper_gamma_by_quadrature: order must be -1, 0 or 1");
  if (s == 1) return std::exp(-z);
  require_off_cut(z, "upper_gamma_by_quadrature");
  return std::exp(-z) * ray_integral(s, z, spec);
}

cplx exp_e1_by_quadrature(cplx z, const QuadratureSpec& spec) {
  require_off_cut(z, "exp_e1_by_quadrature");
  return ray_integral(0, z, spec);
}

}  // namespace dephase::oracles
