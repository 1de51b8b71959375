#pragma once

#include <vector>

#include "dephase/qstate.hpp"

namespace dephase {

enum class Enumeration {
  GrayCode,       // one spin flip per term, O(N) incremental update
  FullRecompute   // every term rebuilt from its index, O(N^2); reference path
};

struct SplittingPlan {
  int n_steps = 1;
  double dt = 0.1;  // N dt = total time
  double eta = 0.0;
  double lambda_sq = 0.0;
  int max_steps = 26;
  unsigned threads = 0;  // 0 = hardware concurrency
  Enumeration enumeration = Enumeration::GrayCode;
};

// log_terms[d] = ln{1 + [2a + (1 - 2d^2)] / (a + d^2)^2}, a = dt^{-2}, d = 0..N-1.
// A configuration q carries weight exp(-eta sum_{m,n} q_m q_n log_terms[|m-n|]).
struct InfluenceTable {
  double dt = 0.0;
  std::vector<double> log_terms;
};

InfluenceTable influence_log_weights(double dt, int n_steps);

struct CoherencePair {
  cplx rho12;
  cplx rho21;
};

// Sum over all 2^N spin configurations; deterministic for a given plan regardless of threads.
CoherencePair propagate_exact(const CoherencePair& pair0, const SplittingPlan& plan);

// Analytic z-basis populations plus the propagated coherences, rotated to the x basis.
DensityMatrix2 population_x_from_pair(const CoherencePair& pair, double rho11_z_0, double lambda_sq, double t);

unsigned resolve_thread_count(unsigned requested);

}  // namespace dephase
