#include "fairx/surplus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairx/errors.hpp"

namespace fairx {

double SurplusProfile::max_delta() const {
  return delta[sorted_view[0]];
}

std::vector<double> SurplusProfile::sorted_deltas() const {
  std::vector<double> out(delta.size());
  for (size_t k = 0; k < delta.size(); ++k) out[k] = delta[sorted_view[k]];
  return out;
}

void SurplusProfile::resort() {
  std::iota(sorted_view.begin(), sorted_view.end(), 0);
  std::stable_sort(sorted_view.begin(), sorted_view.end(),
                   [&](int a, int b) { return delta[a] > delta[b]; });
}

SurplusProfile compute_surplus(const ShareEvaluator& eval, const ExchangeMatrix& x) {
  const int n = x.n();
  SurplusProfile p;
  p.delta.assign(n, 0.0);
  p.sorted_view.assign(n, 0);
  p.per_column_shares.assign(static_cast<size_t>(n) * n, 0.0);
  p.received_utility.assign(n, 0.0);

  std::vector<ColumnShares> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = eval.column(x, j);

  for (int j = 0; j < n; ++j) {
    p.received_utility[j] = cols[j].u_j;
    for (int i = 0; i < n; ++i) p.per_column_shares[static_cast<size_t>(i) * n + j] = cols[j].psi[i];
  }
  for (int i = 0; i < n; ++i) {
    double out_flow = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) out_flow += p.per_column_shares[static_cast<size_t>(i) * n + j];
    p.delta[i] = out_flow - p.received_utility[i];
  }
  p.resort();
  return p;
}

SurplusProfile recompute_surplus_after_column_change(const SurplusProfile& profile,
                                                     const ShareEvaluator& eval,
                                                     const ExchangeMatrix& x, int j,
                                                     bool check_against_full) {
  const int n = x.n();
  if (j < 0 || j >= n) throw InputError("surplus: column index out of range");
  SurplusProfile p = profile;
  ColumnShares col = eval.column(x, j);
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    double& slot = p.per_column_shares[static_cast<size_t>(i) * n + j];
    p.delta[i] += col.psi[i] - slot;
    slot = col.psi[i];
  }
  p.delta[j] += p.received_utility[j] - col.u_j;
  p.received_utility[j] = col.u_j;
  p.resort();

  if (check_against_full) {
    SurplusProfile full = compute_surplus(eval, x);
    for (int i = 0; i < n; ++i)
      if (std::abs(full.delta[i] - p.delta[i]) > 1e-9)
        throw InvariantError("surplus: incremental column update diverged from full recompute at agent " +
                             std::to_string(i) + "; matrix changed outside column " + std::to_string(j));
  }
  return p;
}

LexOrder lex_compare(const std::vector<double>& sorted_a, const std::vector<double>& sorted_b,
                     double slack) {
  if (sorted_a.size() != sorted_b.size()) throw InputError("lex_compare: length mismatch");
  for (size_t k = 0; k < sorted_a.size(); ++k) {
    double d = sorted_a[k] - sorted_b[k];
    if (d < -slack) return LexOrder::less;
    if (d > slack) return LexOrder::greater;
  }
  return LexOrder::equal;
}

}  // namespace fairx
