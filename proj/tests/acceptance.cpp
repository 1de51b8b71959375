// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dephase/analytic_dephasing.hpp"
#include "dephase/analytic_protection.hpp"
#include "dephase/errors.hpp"
#include "dephase/exact_splitting.hpp"
#include "dephase/lab.hpp"
#include "dephase/oracles.hpp"
#include "dephase/specfun.hpp"
#include "support.hpp"

using namespace dephase;
namespace lab = dephase::lab;
using testsupport::rel_err;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ModelParams params(double lambda_sq, double omega0, double eta, double beta = INFINITY) {
  ModelParams p;
  p.lambda_sq = lambda_sq;
  p.omega0 = omega0;
  p.eta = eta;
  p.beta = beta;
  return p;
}

lab::RunConfig config(lab::Solver s, double lambda_sq, double eta) {
  lab::RunConfig c;
  c.solver = s;
  c.params.lambda_sq = lambda_sq;
  c.params.eta = eta;
  return c;
}

Outcome limit_collapses() {
  testsupport::Gen g(901);
  double worst_z = 0.0, worst_x = 0.0, worst_exact = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto r0 = g.state();
    const double l = g.uniform(0.0, 8.0), w = g.uniform(0.0, 3.0), t = g.uniform(0.0, 2.0);
    const double beta = (i % 2) ? INFINITY : g.uniform(0.5, 20.0);
    const auto a = evolve_z(r0, params(l, w, 0.0, beta), t);
    const auto b = measurement_only_z(r0, l, w, t);
    worst_z = std::max({worst_z, std::abs(a.rho12() - b.rho12()), std::abs(a.rho11() - b.rho11())});
    const auto x = evolve_x_zero_T(r0, params(l, 0.0, 0.0), t);
    const auto x0 = change_basis(r0, Basis::X);
    const auto ref = evolve_x_measurement_only(r0, l, 0.0, t, Basis::X);
    worst_x = std::max({worst_x, std::abs(x.rho11() - x0.rho11()), std::abs(x.rho12() - ref.rho12())});
  }
  for (int n : {1, 4, 16})
    for (double l : {0.5, 4.0, 8.0}) {
      const cplx r(0.35355339059327373, -0.35355339059327373);
      SplittingPlan p;
      p.n_steps = n;
      p.dt = 2.0 / 16.0;
      p.lambda_sq = l;
      const auto got = propagate_exact({r, std::conj(r)}, p);
      Mat2 m{};
      m[0][1] = r;
      m[1][0] = std::conj(r);
      const Mat2 want = lindblad_x_propagate(m, l, 0.0, n * p.dt);
      worst_exact = std::max({worst_exact, std::abs(got.rho12 - want[0][1]), std::abs(got.rho21 - want[1][0])});
    }
  return {worst_z < 1e-12 && worst_x < 1e-12 && worst_exact < 1e-12,
          "analytic-z " + fmt(worst_z) + ", analytic-x " + fmt(worst_x) + ", exact " + fmt(worst_exact) + " (tol 1e-12)"};
}

Outcome pure_dephasing_identity() {
  double worst = 0.0;
  for (auto [eta, dt] : {std::pair{0.01, 0.1}, std::pair{0.05, 0.25}, std::pair{0.1, 0.05}})
    for (int n = 1; n <= 8; ++n) {
      SplittingPlan p;
      p.n_steps = n;
      p.dt = dt;
      p.eta = eta;
      const cplx r(0.3, 0.4);
      const auto got = propagate_exact({r, std::conj(r)}, p);
      const double t = n * dt;
      worst = std::max(worst, std::abs(std::abs(got.rho12 / r) - std::pow(1.0 + t * t, -2.0 * eta)));
    }
  return {worst < 1e-10, "max deviation " + fmt(worst) + " (tol 1e-10)"};
}

Outcome oracle_equivalences() {
  double w_infl = 0.0, w_z = 0.0, w_x = 0.0;
  for (double dt : {0.05, 0.1, 0.5}) {
    const auto t = influence_log_weights(dt, 21);
    for (int d = 0; d <= 20; ++d) w_infl = std::max(w_infl, rel_err(t.log_terms[d], oracles::trace_integral_direct(d, dt)));
  }
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.05 * k);
  for (double beta : {1.0, 10.0}) {
    const auto p = params(1.0, 0.5, 0.05, beta);
    const cplx r0(0.35355339059327373, -0.35355339059327373);
    const auto ode = oracles::ode_coherence_z(p, grid, r0);
    for (std::size_t k = 0; k < grid.size(); ++k) w_z = std::max(w_z, rel_err(coherence_z(p, r0, grid[k]), ode[k]));
  }
  {
    const auto p = params(4.0, 0.0, 0.01);
    const cplx r0(0.35355339059327373, -0.35355339059327373);
    const auto ide = oracles::ide_coherence_x(p, grid, r0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const cplx c = coherence_x_zero_T(r0, p, grid[k]);
      w_x = std::max({w_x, rel_err(c.real(), ide[k].real()), rel_err(c.imag(), ide[k].imag())});
    }
  }
  return {w_infl < 1e-8 && w_z < 1e-8 && w_x < 1e-4, "influence " + fmt(w_infl) + " (tol 1e-8), coherence_z " + fmt(w_z) +
                                                         " (tol 1e-8), coherence_x " + fmt(w_x) + " (tol 1e-4)"};
}

const std::vector<double> kDiscrepancyEtas{0.005, 0.01, 0.05, 0.1};

// Exact and analytic-x at lambda^2 = 4, N = 20 over t in [0, 2]; returns the CSV bytes of every series.
std::string discrepancy_run(std::vector<double>* max_diffs, unsigned threads = 0) {
  std::string bytes;
  for (double eta : kDiscrepancyEtas) {
    auto a = config(lab::Solver::AnalyticX, 4.0, eta);
    a.n_steps = 20;
    a.samples = 21;
    auto b = a;
    b.solver = lab::Solver::Exact;
    b.threads = threads;
    const auto c = lab::compare(a, b);
    if (max_diffs) max_diffs->push_back(c.max_abs_diff_rho11);
    bytes += lab::to_csv(c.a) + lab::to_csv(c.b) + lab::comparison_csv(c);
  }
  return bytes;
}

std::string discrepancy_bytes;

Outcome population_discrepancy() {
  std::vector<double> d;
  discrepancy_bytes = discrepancy_run(&d);
  bool increasing = true;
  for (std::size_t k = 1; k < d.size(); ++k) increasing = increasing && d[k] > d[k - 1];
  std::string detail = "max|d rho11_x| over eta {0.005,0.01,0.05,0.1}:";
  for (double v : d) detail += " " + fmt(v);
  return {increasing && d[0] < 0.01, detail + (increasing ? ", increasing" : ", NOT increasing")};
}

Outcome measurement_protection() {
  std::vector<double> eps_a, eps_e;
  for (double l : {0.0, 1.0, 4.0, 8.0}) {
    auto a = config(lab::Solver::AnalyticX, l, 0.05);
    a.t_max = 1.0;
    a.n_steps = 20;
    a.samples = 2;
    auto e = a;
    e.solver = lab::Solver::Exact;
    for (auto [cfg, out] : {std::pair{&a, &eps_a}, std::pair{&e, &eps_e}}) {
      const auto ts = lab::run(*cfg);
      out->push_back(error_epsilon(ts.rows.front().rho, ts.rows.back().rho));
    }
  }
  auto strictly_down = [](const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
      if (!(v[k] < v[k - 1])) return false;
    return true;
  };
  std::string detail = "epsilon(t=1) for lambda^2 {0,1,4,8}: analytic-x";
  for (double v : eps_a) detail += " " + fmt(v);
  detail += "; exact";
  for (double v : eps_e) detail += " " + fmt(v);
  return {strictly_down(eps_a) && strictly_down(eps_e), detail};
}

Outcome commuting_measurement() {
  int violations = 0;
  const cplx r0(0.35355339059327373, -0.35355339059327373);
  for (int k = 1; k <= 100; ++k) {
    const double t = 2.0 * k / 100.0;
    const double m0 = std::abs(coherence_z(params(0.0, 0.0, 0.05), r0, t));
    const double m1 = std::abs(coherence_z(params(1.0, 0.0, 0.05), r0, t));
    const double m4 = std::abs(coherence_z(params(4.0, 0.0, 0.05), r0, t));
    violations += !(m1 < m0) + !(m4 < m1);
  }
  return {violations == 0, std::to_string(violations) + " ordering violations on 100 points of (0, 2]"};
}

Outcome special_functions() {
  double w_rec = 0.0, w_conj = 0.0, w_quad = 0.0;
  for (cplx z : testsupport::incomplete_gamma_grid()) {
    const cplx g0 = upper_gamma(0, z), gm1 = upper_gamma(-1, z), e = std::exp(-z) / z;
    w_rec = std::max(w_rec, std::abs(g0 + gm1 - e) / std::max({std::abs(g0), std::abs(gm1), std::abs(e)}));
    for (int s : {-1, 0, 1}) {
      const cplx v = upper_gamma(s, z);
      w_conj = std::max(w_conj, std::abs(upper_gamma(s, std::conj(z)) - std::conj(v)) / std::abs(v));
      w_quad = std::max(w_quad, rel_err(v, oracles::upper_gamma_by_quadrature(s, z)));
    }
  }
  for (cplx z : testsupport::log_gamma_grid()) {
    w_rec = std::max(w_rec, std::abs(log_gamma(z + 1.0) - log_gamma(z) - std::log(z)));
    w_conj = std::max(w_conj, std::abs(log_gamma(std::conj(z)) - std::conj(log_gamma(z))));
    w_quad = std::max(w_quad, rel_err(std::exp(log_gamma(z)), oracles::gamma_by_quadrature(z)));
  }
  return {w_rec < 1e-12 && w_conj < 1e-14 && w_quad < 1e-10,
          "recurrence " + fmt(w_rec) + " (tol 1e-12), conjugation " + fmt(w_conj) + " (tol 1e-14), quadrature " +
              fmt(w_quad) + " (tol 1e-10)"};
}

Outcome state_validity() {
  const std::vector<lab::Solver> solvers{lab::Solver::MeasurementOnlyZ, lab::Solver::MeasurementOnlyX,
                                         lab::Solver::AnalyticZ,        lab::Solver::AnalyticX,
                                         lab::Solver::Exact,            lab::Solver::OdeOracleZ,
                                         lab::Solver::IdeOracleX};
  int runs = 0, bad_runs = 0;
  std::ostringstream bad;
  for (lab::Solver s : solvers)
    for (double eta : {0.0, 0.005, 0.01, 0.05})
      for (double l : {0.0, 1.0, 4.0, 8.0}) {
        auto c = config(s, l, eta);
        c.n_steps = 20;
        c.samples = 21;
        ++runs;
        std::string why;
        try {
          const auto ts = lab::run(c);
          double first_t = -1.0, worst = 0.0;
          for (const auto& row : ts.rows) {
            const Validity v = check_state(row.rho);
            const double m = v.finite ? std::max({v.trace_error, v.hermiticity_error, v.positivity_deficit}) : INFINITY;
            if (m > 1e-10 && first_t < 0.0) first_t = row.t;
            worst = std::max(worst, m);
          }
          if (first_t >= 0.0) why = "invalid from t=" + fmt(first_t) + " (worst " + fmt(worst) + ")";
        } catch (const Error& e) {
          why = std::string("error: ") + e.what();
        }
        if (!why.empty()) {
          ++bad_runs;
          bad << "\n    " << lab::to_string(s) << " eta=" << eta << " lambda_sq=" << l << ": " << why;
        }
      }
  return {bad_runs == 0, std::to_string(runs - bad_runs) + "/" + std::to_string(runs) + " runs valid within 1e-10" + bad.str()};
}

Outcome determinism() {
  if (discrepancy_bytes.empty()) discrepancy_bytes = discrepancy_run(nullptr);
  // The repeat uses a different worker count; the reduction order must not depend on it.
  const std::string second = discrepancy_run(nullptr, 3);
  const bool same = second == discrepancy_bytes;
  return {same, std::to_string(second.size()) + " bytes, " + (same ? "identical" : "DIFFERENT") + " across two runs (threads auto vs 3)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "limit collapses", 1.0, limit_collapses},
      {2, "pure-dephasing identity", 1.0, pure_dephasing_identity},
      {3, "oracle equivalences", 30.0, oracle_equivalences},
      {4, "population discrepancy grows with eta", 120.0, population_discrepancy},
      {5, "sigma_x measurement protects the population", 120.0, measurement_protection},
      {6, "sigma_z measurement accelerates decoherence", 1.0, commuting_measurement},
      {7, "special-function suite", 5.0, special_functions},
      {8, "state validity on the standard grid", INFINITY, state_validity},
      {9, "byte-identical output", INFINITY, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d %s: %s [%s; %.2fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
