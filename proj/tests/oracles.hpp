#pragma once

// Test-only reference implementations, kept independent of the library's
// evaluation paths: plain subset sums with freshly masked bundles, no
// Gray-code walks, no incremental family state.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fairx/exchange.hpp"
#include "fairx/instance.hpp"
#include "fairx/utility.hpp"

namespace oracles {

inline double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
  return r;
}

// Direct evaluation of the Shapley-share formula by mask enumeration.
inline double naive_shapley(const std::function<double(std::span<const double>)>& u,
                            std::span<const double> bundle, int donor) {
  const int n = static_cast<int>(bundle.size());
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if ((mask >> donor) & 1u) continue;  // subsets of N \ {donor}
    std::vector<double> with(n, 0.0), without(n, 0.0);
    int size = 0;
    for (int k = 0; k < n; ++k) {
      if ((mask >> k) & 1u) {
        with[k] = bundle[k];
        without[k] = bundle[k];
        ++size;
      }
    }
    with[donor] = bundle[donor];
    acc += (u(with) - u(without)) / binom(n - 1, size);
  }
  return acc / n;
}

inline double naive_utility(const fairx::Instance& inst, int agent, std::span<const double> bundle,
                            bool perturbed) {
  double u = fairx::eval_utility(inst.utilities[agent], bundle);
  if (perturbed) {
    double s = 0.0;
    for (double b : bundle) s += b;
    u += inst.epsilon / inst.n * s;
  }
  return u;
}

// Full surplus vector from naive Shapley shares (exact rule only).
inline std::vector<double> naive_surplus(const fairx::Instance& inst, const fairx::ExchangeMatrix& x,
                                         bool perturbed) {
  const int n = inst.n;
  std::vector<double> delta(n, 0.0);
  for (int j = 0; j < n; ++j) {
    std::vector<double> b = x.bundle(j);
    auto u = [&](std::span<const double> bb) { return fairx::eval_utility(inst.utilities[j], bb); };
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      double psi = naive_shapley(u, b, i);
      if (perturbed) psi += inst.epsilon / n * b[i];
      delta[i] += psi;
    }
    delta[j] -= naive_utility(inst, j, b, perturbed);
  }
  return delta;
}

}  // namespace oracles
