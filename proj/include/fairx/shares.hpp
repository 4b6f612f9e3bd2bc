#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fairx/exchange.hpp"
#include "fairx/instance.hpp"

namespace fairx {

// A share rule plus the perturbation wrapper psi~_ij = psi_ij + (eps/n)*x_ij.
// When perturbed is set, receiver utilities are evaluated perturbed as well,
// so the efficiency axiom holds for the (u~, psi~) pair.
struct ShareOracle {
  ShareRule rule;
  bool perturbed = false;
  double eps = 0.0;
  int n = 0;

  static ShareOracle plain(const Instance& inst) {
    return ShareOracle{inst.share_rule, false, inst.epsilon, inst.n};
  }
  static ShareOracle perturbed_of(const Instance& inst) {
    return ShareOracle{inst.share_rule, true, inst.epsilon, inst.n};
  }
};

using UtilityFn = std::function<double(std::span<const double>)>;

// Shapley share of `donor` in u at `bundle`, by full enumeration of donor
// subsets: (1/n) * sum_{S subset of N\{donor}} C(n-1,|S|)^-1 *
// (u(b[S+donor]) - u(b[S])). Cost 2^(n-1) evaluations of u; refuses
// n > exact_cap with a pointer at the sampled oracle.
double shapley_exact_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                        int exact_cap = 16);

// Unbiased permutation estimator of the above: average over m permutations of
// the marginal of `donor` over its predecessors. Deterministic given seed.
double shapley_sampled_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                          int samples, std::uint64_t seed);

// psi_ij = u_j(b) * w_ij*b_i / sum_k w_kj*b_k, with 0/0 = 0.
double proportional_share_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                             std::span<const double> column_weights);

inline double perturbed_share(double base_share, double x_ij, double eps, int n) {
  return base_share + (eps / n) * x_ij;
}

struct ColumnShares {
  std::vector<double> psi;  // psi_ij per donor i; entry j is 0
  double u_j = 0.0;         // receiver utility at this column (perturbed if oracle is)
};

// Monotone map r -> psi_ij with the donor's own entry set to r, everything
// else in the column frozen. Family-specialized so binary-search probes do
// not re-enumerate subsets.
class OwnEntryCurve {
 public:
  explicit OwnEntryCurve(std::function<double(double)> f) : f_(std::move(f)) {}
  double operator()(double r) const { return f_(r); }

 private:
  std::function<double(double)> f_;
};

// Evaluates share columns for one instance under one oracle. Memoizes the
// most recent results per column; Algorithms 2-3 repeatedly query columns
// they did not touch.
class ShareEvaluator {
 public:
  ShareEvaluator(const Instance& inst, const ShareOracle& oracle);

  const ShareOracle& oracle() const { return oracle_; }
  const Instance& instance() const { return inst_; }

  ColumnShares column(const ExchangeMatrix& x, int j) const;
  ColumnShares column_from_bundle(std::span<const double> bundle, int j) const;

  double single(std::span<const double> bundle, int donor, int j) const;

  OwnEntryCurve own_entry_curve(std::span<const double> bundle, int donor, int j) const;

  // Receiver utility used by this oracle (perturbed when the oracle is).
  double receiver_utility(std::span<const double> bundle, int j) const;

  std::uint64_t utility_evals() const { return evals_; }

 private:
  const Instance& inst_;
  ShareOracle oracle_;
  mutable std::vector<std::pair<std::vector<double>, ColumnShares>> memo_;  // one slot per column
  mutable std::uint64_t evals_ = 0;

  ColumnShares exact_column(std::span<const double> bundle, int j) const;
  ColumnShares sampled_column(std::span<const double> bundle, int j) const;
  ColumnShares proportional_column(std::span<const double> bundle, int j) const;
};

}  // namespace fairx
