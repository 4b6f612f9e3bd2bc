#pragma once

#include <cstdint>
#include <vector>

#include "fairx/utility.hpp"

namespace fairx {

enum class ShareRuleKind { shapley_exact, shapley_sampled, proportional };

struct ShareRule {
  ShareRuleKind kind = ShareRuleKind::shapley_exact;
  int samples = 0;              // shapley_sampled: permutations per column
  std::uint64_t seed = 0;       // shapley_sampled: estimator stream seed
  std::vector<double> weights;  // proportional: n*n row-major w_ij; empty = all ones
  int exact_cap = 16;           // shapley_exact refuses larger n (2^(n-1) cost)
};

struct Instance {
  int n = 0;
  std::vector<UtilitySpec> utilities;  // one per agent
  ShareRule share_rule;
  double epsilon = 0.0;
  double lipschitz = 0.0;  // declared per-coordinate bound L
  bool perturbed = false;  // evaluate with the (eps/n)-linear perturbation

  // Checks n >= 2, epsilon in (0,1), L >= 1, well-formed utility parameters,
  // and that every family's analytic constant is covered by the declared L.
  void validate() const;
};

}  // namespace fairx
