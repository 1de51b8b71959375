#include "dephase/exact_splitting.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <thread>

#include "dephase/errors.hpp"

namespace dephase {
namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Class index from the end spins: bit0 = (q_N == -1), bit1 = (q_1 != q_N).
constexpr int kClasses = 4;
using ClassSums = std::array<CompensatedSum, kClasses>;

// ln cosh x and ln sinh x for x >= 0 without overflow.
double log_cosh(double x) { return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2; }
double log_sinh(double x) {
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < 1e-3) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

struct Kernel {
  int n = 0;
  double eta = 0.0;
  double log_prefactor = 0.0;  // -lambda^2 N dt
  double log_b_plus = 0.0;
  double log_b_minus = 0.0;
  std::vector<double> log_terms;

  // Integer lag correlations C_d = sum_m q_m q_{m+d} fix the quadratic form exactly:
  // sum_{m,n} q_m q_n L[|m-n|] = N L[0] + 2 sum_{d>=1} C_d L[d].
  double log_weight(const std::vector<int>& corr, int n_diff) const {
    double quad = static_cast<double>(n) * log_terms[0];
    double cross = 0.0;
    for (int d = 1; d < n; ++d) cross += static_cast<double>(corr[d]) * log_terms[d];
    quad += 2.0 * cross;
    const int n_same = n - 1 - n_diff;
    double lw = log_prefactor - eta * quad + static_cast<double>(n_same) * log_b_plus;
    if (n_diff > 0) lw += static_cast<double>(n_diff) * log_b_minus;
    return lw;
  }
};

void spins_from_gray(std::uint64_t g, int n, std::vector<int>& q) {
  for (int k = 0; k < n; ++k) q[k] = ((g >> k) & 1u) ? -1 : 1;
}

void rebuild(const std::vector<int>& q, int n, std::vector<int>& corr, int& n_diff) {
  for (int d = 1; d < n; ++d) {
    int c = 0;
    for (int m = 0; m + d < n; ++m) c += q[m] * q[m + d];
    corr[d] = c;
  }
  n_diff = 0;
  for (int m = 0; m + 1 < n; ++m) n_diff += q[m] != q[m + 1];
}

int class_of(const std::vector<int>& q, int n) { return (q[n - 1] == -1 ? 1 : 0) | (q[0] != q[n - 1] ? 2 : 0); }

ClassSums run_segment(const Kernel& kern, std::uint64_t begin, std::uint64_t end, Enumeration mode) {
  const int n = kern.n;
  ClassSums sums;
  std::vector<int> q(n), corr(n, 0);
  int n_diff = 0;
  spins_from_gray(begin ^ (begin >> 1), n, q);
  rebuild(q, n, corr, n_diff);
  for (std::uint64_t i = begin; i < end; ++i) {
    if (i != begin) {
      if (mode == Enumeration::GrayCode) {
        const int k = std::countr_zero(i);
        const int qk = q[k];
        for (int d = 1; d < n; ++d) {
          int partners = 0;
          if (k - d >= 0) partners += q[k - d];
          if (k + d < n) partners += q[k + d];
          corr[d] -= 2 * qk * partners;
        }
        if (k > 0) n_diff += (q[k - 1] == qk) ? 1 : -1;
        if (k + 1 < n) n_diff += (q[k + 1] == qk) ? 1 : -1;
        q[k] = -qk;
      } else {
        spins_from_gray(i ^ (i >> 1), n, q);
        rebuild(q, n, corr, n_diff);
      }
    }
    sums[class_of(q, n)].add(std::exp(kern.log_weight(corr, n_diff)));
  }
  return sums;
}

}  // namespace

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

InfluenceTable influence_log_weights(double dt, int n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Domain, "influence_log_weights: dt must be > 0");
  if (n_steps < 1) fail(ErrorKind::Domain, "influence_log_weights: n_steps must be >= 1");
  InfluenceTable t;
  t.dt = dt;
  t.log_terms.resize(static_cast<std::size_t>(n_steps));
  const double a = 1.0 / (dt * dt);
  for (int d = 0; d < n_steps; ++d) {
    const double d2 = static_cast<double>(d) * static_cast<double>(d);
    const double den = a + d2;
    t.log_terms[d] = std::log1p(((2.0 * a + 1.0) - 2.0 * d2) / (den * den));
  }
  return t;
}

CoherencePair propagate_exact(const CoherencePair& pair0, const SplittingPlan& plan) {
  const int n = plan.n_steps;
  if (n < 1) fail(ErrorKind::Domain, "propagate_exact: n_steps must be >= 1");
  if (n > plan.max_steps || n > 62)
    fail(ErrorKind::Resource, "propagate_exact: n_steps = " + std::to_string(n) + " exceeds the cap of " +
                                  std::to_string(std::min(plan.max_steps, 62)) +
                                  "; cost grows as 2^N N, so study convergence at smaller N instead");
  if (!(plan.eta >= 0.0) || !(plan.lambda_sq >= 0.0))
    fail(ErrorKind::Domain, "propagate_exact: eta and lambda_sq must be >= 0");

  Kernel kern;
  kern.n = n;
  kern.eta = plan.eta;
  kern.log_terms = influence_log_weights(plan.dt, n).log_terms;
  const double x = plan.lambda_sq * plan.dt;
  kern.log_prefactor = -plan.lambda_sq * static_cast<double>(n) * plan.dt;
  kern.log_b_plus = log_cosh(x);
  kern.log_b_minus = log_sinh(x);

  // Segment layout depends only on N, so results do not depend on the worker count.
  const std::uint64_t total = std::uint64_t{1} << n;
  const int seg_bits = std::min(n, 6);
  const std::uint64_t n_seg = std::uint64_t{1} << seg_bits;
  const std::uint64_t seg_len = total / n_seg;
  std::vector<ClassSums> partial(n_seg);

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_thread_count(plan.threads), n_seg));
  if (workers <= 1) {
    for (std::uint64_t s = 0; s < n_seg; ++s)
      partial[s] = run_segment(kern, s * seg_len, (s + 1) * seg_len, plan.enumeration);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t s = next.fetch_add(1); s < n_seg; s = next.fetch_add(1))
          partial[s] = run_segment(kern, s * seg_len, (s + 1) * seg_len, plan.enumeration);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::array<double, kClasses> w{};
  for (int c = 0; c < kClasses; ++c) {
    CompensatedSum acc;
    for (std::uint64_t s = 0; s < n_seg; ++s) {
      acc.add(partial[s][c].sum);
      acc.add(partial[s][c].comp);
    }
    w[c] = acc.value();
  }

  const double b_plus = std::cosh(x);
  const double b_minus = std::sinh(x);
  // A_{+1} p = (b+ p12 + b- p21, 0); A_{-1} p = (0, b- p12 + b+ p21); sigma_x swaps when q_1 != q_N.
  const cplx up = b_plus * pair0.rho12 + b_minus * pair0.rho21;
  const cplx down = b_minus * pair0.rho12 + b_plus * pair0.rho21;
  CoherencePair out;
  out.rho12 = w[0] * up + w[3] * down;
  out.rho21 = w[1] * down + w[2] * up;
  return out;
}

DensityMatrix2 population_x_from_pair(const CoherencePair& pair, double rho11_z_0, double lambda_sq, double t) {
  DensityMatrix2 z;
  z.basis = Basis::Z;
  const double p = 0.5 + (2.0 * rho11_z_0 - 1.0) / 2.0 * std::exp(-2.0 * lambda_sq * t);
  z.m[0][0] = p;
  z.m[1][1] = 1.0 - p;
  z.m[0][1] = pair.rho12;
  z.m[1][0] = pair.rho21;
  return change_basis(z, Basis::X);
}

}  // namespace dephase
