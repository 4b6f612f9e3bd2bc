#pragma once

#include <vector>

#include "fairx/exchange.hpp"
#include "fairx/shares.hpp"

namespace fairx {

// Per-agent surpluses Delta_i = sum_{j != i} psi_ij(x_j) - u_i(x_i), the
// share matrix they were computed from, and the descending-sorted view the
// solver's progress argument runs on.
struct SurplusProfile {
  std::vector<double> delta;
  std::vector<int> sorted_view;              // sigma: delta[sigma[0]] >= ... >= delta[sigma[n-1]]
  std::vector<double> per_column_shares;     // n x n row-major, [i*n + j] = psi_ij
  std::vector<double> received_utility;      // u_i(x_i)

  int n() const { return static_cast<int>(delta.size()); }

  double psi(int i, int j) const { return per_column_shares[static_cast<size_t>(i) * delta.size() + j]; }

  double max_delta() const;

  // delta values in sigma order (descending).
  std::vector<double> sorted_deltas() const;

  void resort();
};

SurplusProfile compute_surplus(const ShareEvaluator& eval, const ExchangeMatrix& x);

// x differs from the profile's snapshot only in column j: re-evaluates psi_.j
// and u_j, patches every surplus, re-sorts. With check_against_full set, a
// full recompute runs alongside and divergence > 1e-9 throws (precondition
// violation detector).
SurplusProfile recompute_surplus_after_column_change(const SurplusProfile& profile,
                                                     const ShareEvaluator& eval,
                                                     const ExchangeMatrix& x, int j,
                                                     bool check_against_full = false);

enum class LexOrder { less, equal, greater };

// Compares descending-sorted profiles entrywise; entries within slack are
// equal, the first strict difference decides.
LexOrder lex_compare(const std::vector<double>& sorted_a, const std::vector<double>& sorted_b,
                     double slack);

}  // namespace fairx
