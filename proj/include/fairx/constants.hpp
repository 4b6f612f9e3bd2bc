#pragma once

#include <cstdint>

namespace fairx {

// All thresholds the algorithms compare against, derived once per run from
// (epsilon, n, L) in exact rational arithmetic and rounded to double a single
// time. Cached in the trace so every module sees identical values.
struct SolverConstants {
  int n = 0;
  double epsilon = 0.0;
  double lipschitz = 0.0;

  double eps_over_n = 0.0;       // termination: max surplus <= eps/n
  double eps_over_n2 = 0.0;      // S-selection gap, receiver flow threshold
  double eps_over_2n3 = 0.0;     // per-phase surplus floor offset delta_i
  double eps_over_4n3 = 0.0;     // phase trigger gap
  double graph_alpha = 0.0;      // eps/(n*L), exchange-graph threshold
  double increase_step = 0.0;    // eps/(n^3*L), flow-increase step
  double tol_bs = 0.0;           // eps/(64*n^4*L), binary-search bracket width
  double lex_slack = 0.0;        // n*L*tol_bs = eps/(64*n^3)
  double lex_fp_slack = 0.0;     // numeric-noise slack for strict lex progress
  double phase_iter_bound = 0.0; // 4*n^4*L/eps + n, inner-iteration cap
  std::uint64_t max_outer_default = 0;  // 10*n^5*ceil(L/eps)

  static SolverConstants derive(int n, double epsilon, double lipschitz);
};

}  // namespace fairx
