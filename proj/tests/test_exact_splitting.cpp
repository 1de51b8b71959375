#include <cmath>

#include "doctest.h"
#include "dephase/analytic_protection.hpp"
#include "dephase/errors.hpp"
#include "dephase/exact_splitting.hpp"
#include "dephase/oracles.hpp"
#include "support.hpp"

using namespace dephase;
using testsupport::Gen;
using testsupport::rel_err;

namespace {

using M2 = std::array<std::array<double, 2>, 2>;

M2 mul(const M2& a, const M2& b) {
  M2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

// Unreduced sum: every configuration multiplies its N step matrices A_{q_n} in order and carries
// the full N x N double product of trace factors.
CoherencePair brute_force(const CoherencePair& p0, int n, double dt, double eta, double lambda_sq) {
  const double bp = 0.5 * (std::exp(lambda_sq * dt) + std::exp(-lambda_sq * dt));
  const double bm = 0.5 * (std::exp(lambda_sq * dt) - std::exp(-lambda_sq * dt));
  const M2 a_up{{{bp, bm}, {0.0, 0.0}}};
  const M2 a_dn{{{0.0, 0.0}, {bm, bp}}};
  const double a = 1.0 / (dt * dt);
  CoherencePair out{0.0, 0.0};
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    std::vector<int> q(n);
    for (int k = 0; k < n; ++k) q[k] = ((mask >> k) & 1u) ? -1 : 1;
    M2 prod{{{1.0, 0.0}, {0.0, 1.0}}};
    for (int k = 0; k < n; ++k) prod = mul(prod, q[k] == 1 ? a_up : a_dn);
    double trace = 1.0;
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        const double d2 = double(m - k) * double(m - k);
        trace *= std::pow(1.0 + (2.0 * a + (1.0 - 2.0 * d2)) / ((a + d2) * (a + d2)), -eta * q[m] * q[k]);
      }
    out.rho12 += trace * (prod[0][0] * p0.rho12 + prod[0][1] * p0.rho21);
    out.rho21 += trace * (prod[1][0] * p0.rho12 + prod[1][1] * p0.rho21);
  }
  const double pre = std::exp(-lambda_sq * n * dt);
  out.rho12 *= pre;
  out.rho21 *= pre;
  return out;
}

SplittingPlan plan(int n, double dt, double eta, double lambda_sq) {
  SplittingPlan p;
  p.n_steps = n;
  p.dt = dt;
  p.eta = eta;
  p.lambda_sq = lambda_sq;
  return p;
}

bool bit_equal(const CoherencePair& a, const CoherencePair& b) { return a.rho12 == b.rho12 && a.rho21 == b.rho21; }

}  // namespace

TEST_SUITE("exact-splitting") {
  TEST_CASE("influence table against the direct double integral") {
    for (double dt : {0.05, 0.1, 0.5}) {
      const InfluenceTable t = influence_log_weights(dt, 21);
      for (int d = 0; d <= 20; ++d) CHECK(rel_err(t.log_terms[d], oracles::trace_integral_direct(d, dt)) < 1e-8);
    }
  }

  TEST_CASE("influence table at lag zero") {
    // 4 int_0^dt tau/(1+tau^2) dtau = 2 ln(1 + dt^2)
    for (double dt : {0.01, 0.3, 2.0}) CHECK(rel_err(influence_log_weights(dt, 1).log_terms[0], 2.0 * std::log1p(dt * dt)) < 1e-14);
  }

  TEST_CASE("reduced sum equals the unreduced configuration sum") {
    Gen g(41);
    for (int i = 0; i < 30; ++i) {
      const int n = g.integer(1, 8);
      const double dt = g.uniform(0.02, 0.5), eta = g.uniform(0.0, 0.2), l = g.uniform(0.0, 8.0);
      const CoherencePair p0{cplx(g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5)), 0.0};
      const CoherencePair p{p0.rho12, std::conj(p0.rho12)};
      const auto ref = brute_force(p, n, dt, eta, l);
      const auto got = propagate_exact(p, plan(n, dt, eta, l));
      CHECK(std::abs(got.rho12 - ref.rho12) < 1e-12 * (1.0 + std::abs(ref.rho12)));
      CHECK(std::abs(got.rho21 - ref.rho21) < 1e-12 * (1.0 + std::abs(ref.rho21)));
    }
  }

  TEST_CASE("eta = 0 equals the sigma_x measurement propagator") {
    for (int n : {1, 4, 16})
      for (double l : {0.5, 4.0}) {
        const double dt = 0.1;
        const cplx r(0.2, -0.35);
        const auto got = propagate_exact({r, std::conj(r)}, plan(n, dt, 0.0, l));
        Mat2 x{};
        x[0][1] = r;
        x[1][0] = std::conj(r);
        const Mat2 ref = lindblad_x_propagate(x, l, 0.0, n * dt);
        CHECK(std::abs(got.rho12 - ref[0][1]) < 1e-12);
        CHECK(std::abs(got.rho21 - ref[1][0]) < 1e-12);
      }
  }

  TEST_CASE("lambda = 0 gives the pure-dephasing factor") {
    for (auto [eta, dt] : {std::pair{0.01, 0.1}, std::pair{0.05, 0.25}, std::pair{0.1, 0.05}})
      for (int n = 1; n <= 8; ++n) {
        const cplx r(0.3, 0.4);
        const auto got = propagate_exact({r, std::conj(r)}, plan(n, dt, eta, 0.0));
        const double t = n * dt;
        CHECK(std::abs(std::abs(got.rho12 / r) - std::pow(1.0 + t * t, -2.0 * eta)) < 1e-10);
      }
  }

  TEST_CASE("Gray-code, full recompute and any thread count give identical bits") {
    Gen g(42);
    for (int i = 0; i < 6; ++i) {
      const int n = g.integer(3, 14);
      auto p = plan(n, g.uniform(0.05, 0.3), g.uniform(0.0, 0.1), g.uniform(0.0, 6.0));
      const CoherencePair p0{cplx(0.3, -0.1), cplx(0.3, 0.1)};
      p.threads = 1;
      const auto ref = propagate_exact(p0, p);
      p.enumeration = Enumeration::FullRecompute;
      CHECK(bit_equal(propagate_exact(p0, p), ref));
      p.enumeration = Enumeration::GrayCode;
      for (unsigned th : {2u, 3u, 7u}) {
        p.threads = th;
        CHECK(bit_equal(propagate_exact(p0, p), ref));
      }
    }
  }

  TEST_CASE("property: hermiticity of the propagated pair") {
    Gen g(43);
    for (int i = 0; i < 40; ++i) {
      const cplx r(g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5));
      const auto out = propagate_exact({r, std::conj(r)}, plan(g.integer(1, 10), g.uniform(0.02, 0.3), g.uniform(0.0, 0.1), g.uniform(0.0, 8.0)));
      CHECK(std::abs(out.rho21 - std::conj(out.rho12)) < 1e-14);
    }
  }

  TEST_CASE("property: refinement converges") {
    // Fixed t = 1: successive differences shrink as N doubles.
    const cplx r(0.35, -0.35);
    double prev_diff = INFINITY;
    cplx prev = propagate_exact({r, std::conj(r)}, plan(2, 0.5, 0.05, 4.0)).rho12;
    for (int n : {4, 8, 16}) {
      const cplx cur = propagate_exact({r, std::conj(r)}, plan(n, 1.0 / n, 0.05, 4.0)).rho12;
      const double diff = std::abs(cur - prev);
      CHECK(diff < prev_diff);
      prev_diff = diff;
      prev = cur;
    }
  }

  TEST_CASE("populations and x-basis assembly") {
    const cplx r(0.35355339059327373, -0.35355339059327373);
    const auto x = population_x_from_pair({r, std::conj(r)}, 0.5, 4.0, 0.0);
    CHECK(x.basis == Basis::X);
    CHECK(std::abs(x.rho11() - testsupport::kPhaseStateRho11X) < 1e-10);
  }

  TEST_CASE("resource cap and domain") {
    auto p = plan(27, 0.01, 0.01, 1.0);
    try {
      propagate_exact({1.0, 1.0}, p);
      FAIL("expected Resource");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resource);
    }
    p.n_steps = 0;
    CHECK_THROWS_AS(propagate_exact({1.0, 1.0}, p), Error);
    CHECK_THROWS_AS(influence_log_weights(0.0, 3), Error);
    CHECK(resolve_thread_count(3) == 3u);
    CHECK(resolve_thread_count(0) >= 1u);
  }
}
