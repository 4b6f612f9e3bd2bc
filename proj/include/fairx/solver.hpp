#pragma once

#include <cstdint>
#include <vector>

#include "fairx/constants.hpp"
#include "fairx/exchange.hpp"
#include "fairx/graph.hpp"
#include "fairx/instance.hpp"
#include "fairx/shares.hpp"
#include "fairx/surplus.hpp"
#include "fairx/trace.hpp"

namespace fairx {

struct SolverConfig {
  double epsilon = 0.0;              // 0 = take the instance's
  double lipschitz = 0.0;            // 0 = take the instance's declared L
  std::uint64_t max_outer_iters = 0; // 0 = 10*n^5*ceil(L/eps)
  std::uint64_t seed = 0;            // 0 = instance share-rule seed (sampled rule only)
  bool record_trace = true;
  bool allow_noncrossmonotone = false;
  bool check_invariants = true;      // per-step acyclicity + lex progress asserts
};

enum class SolverStatus { converged, max_iters_exceeded };

struct SolverResult {
  ExchangeMatrix x_final;
  std::vector<double> surplus_perturbed;
  std::vector<double> surplus_original;
  SolverStatus status = SolverStatus::converged;
  std::uint64_t outer_iterations = 0;
  SolverTrace trace;
  std::vector<std::vector<double>> trajectory;  // sorted perturbed surpluses per outer iteration
  bool certified_reciprocal_3eps = false;
  bool certified_graph_acyclic = false;
};

// Algorithm: greedy high-surplus set. Built from the argmax-surplus agent,
// adding the next-highest agent while its surplus is within eps/n^2 of the
// minimum in S. Requires max surplus > eps/n; on exit every member has
// positive surplus, |S| < n, and min_S > max_rest + eps/n^2.
std::vector<int> select_high_surplus_set(const SurplusProfile& profile, double eps, int n);

// argmax_{j not in S} sum_{i in S} psi_ij; the winning column exceeds
// eps/n^2 when the selection precondition held, otherwise throws.
int find_receiver(const SurplusProfile& profile, const std::vector<int>& s, double eps, int n);

// Largest reduction of x_ij keeping Delta_i >= floor_surplus: returns 0 when
// even full zeroing keeps Delta_i above the floor, otherwise a value r* with
// Delta_i(r*) in [floor, floor + L*tol_bs], bracketed to width <= tol_bs.
double binary_search_reduction(const ExchangeMatrix& x, int i, int j, double floor_surplus,
                               const ShareEvaluator& eval, double tol_bs);

// Same bracketing against a prepared own-entry share curve; delta_at_cur and
// psi_at_cur come from the caller's surplus profile.
double binary_search_reduction_core(const OwnEntryCurve& curve, double cur_r, double delta_at_cur,
                                    double psi_at_cur, double floor_surplus, double tol_bs);

// Threshold-based flow decrease from S into column j (one phase). Mutates x
// and profile, appends decrease_flow steps to trace when given, asserts the
// phase postconditions, and returns the inner-iteration count.
int decrease_flow_phase(ExchangeMatrix& x, const std::vector<int>& s, int j,
                        const ShareEvaluator& eval, const SolverConstants& c,
                        SurplusProfile& profile, SolverTrace* trace, std::uint64_t outer_iter);

// Single flow increase x_ji += eps/(n^3 L); requires x_ji < 1 - eps/(nL).
void increase_flow_step(ExchangeMatrix& x, int j, int i, const SolverConstants& c);

SolverResult run_local_search(const Instance& inst, const SolverConfig& cfg = {});

}  // namespace fairx
