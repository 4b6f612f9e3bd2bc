#include "fairx/instance.hpp"

#include <cmath>
#include <string>

#include "fairx/errors.hpp"

namespace fairx {

void Instance::validate() const {
  if (n < 2) throw InputError("instance: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("instance: epsilon must be in (0,1)");
  if (!(lipschitz >= 1.0)) throw InputError("instance: lipschitz must be >= 1");
  if (static_cast<int>(utilities.size()) != n) throw InputError("instance: utilities size != n");
  for (int i = 0; i < n; ++i) {
    validate_utility(utilities[i], n);
    double a = analytic_lipschitz(utilities[i]);
    if (a > lipschitz + 1e-12)
      throw InputError("instance: declared L below analytic bound for agent " + std::to_string(i) +
                       " (" + std::to_string(a) + " > " + std::to_string(lipschitz) + ")");
  }
  if (share_rule.kind == ShareRuleKind::shapley_sampled && share_rule.samples < 1)
    throw InputError("instance: sampled share rule needs samples >= 1");
  if (share_rule.kind == ShareRuleKind::proportional && !share_rule.weights.empty()) {
    if (static_cast<int>(share_rule.weights.size()) != n * n)
      throw InputError("instance: proportional weights must be n*n");
    for (double w : share_rule.weights)
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("instance: proportional weight must be >= 0");
  }
}

}  // namespace fairx
