#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairx/exchange.hpp"
#include "fairx/instance.hpp"
#include "fairx/shares.hpp"
#include "fairx/trace.hpp"

namespace fairx {

struct ReciprocityCheck {
  bool pass = false;
  double max_abs_surplus = 0.0;  // smallest delta at which x is reciprocal
  std::vector<double> surplus;   // unperturbed deltas
};

// Computes every surplus with the UNPERTURBED oracle; passes iff
// max_i |Delta_i| <= delta.
ReciprocityCheck check_reciprocity(const Instance& inst, const ExchangeMatrix& x, double delta);

struct BlockingWitness {
  std::vector<int> coalition;
  std::vector<double> gains;  // per member: u_i(y[S]_i) - u_i(x_i)
};

struct CoreStabilityCheck {
  bool pass = false;
  double requested_eps = 0.0;
  // Smallest eps' at which no coalition blocks: max over coalitions of the
  // minimum member gain under full internal sharing, floored at 0.
  double core_stable_at = 0.0;
  std::optional<BlockingWitness> witness;  // first blocking coalition when failing
};

// Exhaustive coalition check against the full-share deviation y[S] (all-ones
// within S, zero elsewhere). Utility monotonicity makes y[S] the best
// deviation, so this certifies eps-core stability exactly. Enumeration order:
// increasing cardinality, then lexicographic. Cap n <= 20.
CoreStabilityCheck check_core_stability_bruteforce(const Instance& inst, const ExchangeMatrix& x,
                                                   double eps);

struct AxiomResult {
  std::string axiom;
  bool guaranteed = true;  // false: informational only (rule does not promise it)
  bool pass = false;
  double max_residual = 0.0;
};

// Random-sampled residual maxima for efficiency, normalization, monotonicity
// and cross-monotonicity of the instance's share rule.
std::vector<AxiomResult> audit_share_axioms(const Instance& inst, const ShareOracle& oracle,
                                            int trials, std::uint64_t seed = 12345);

// Same audit against an arbitrary column-share functor (lets tests plant
// broken oracles). cross_guaranteed marks whether the rule promises
// cross-monotonicity or the residual is informational.
using ColumnShareFn = std::function<ColumnShares(const ExchangeMatrix&, int)>;
std::vector<AxiomResult> audit_share_axioms_fn(int n, const ColumnShareFn& shares,
                                               bool cross_guaranteed, int trials,
                                               std::uint64_t seed = 12345);

struct TraceCheck {
  bool pass = false;
  long long first_violation_step = -1;  // index into trace.steps, -1 if none
  std::string reason;
};

// Replays a solver trace: acyclicity after every step, snapshot chaining,
// decrease-phase postconditions, exact increase step size, per-phase
// iteration bound, lexicographic progress per outer iteration, and final
// surpluses re-derived from the reconstructed exchange.
TraceCheck validate_trace(const SolverTrace& trace, const Instance& inst);

struct VerificationReport {
  ReciprocityCheck reciprocity;
  CoreStabilityCheck core;
  std::vector<AxiomResult> axiom_results;
};

VerificationReport verify_exchange(const Instance& inst, const ExchangeMatrix& x,
                                   double reciprocity_delta, double core_eps, int axiom_trials = 50);

}  // namespace fairx
