#include "fairx/shares.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "fairx/errors.hpp"
#include "fairx/parallel.hpp"
#include "fairx/rng.hpp"

namespace fairx {

namespace {

// (1/n) / C(n-1, s) for s = 0..n-1. Exact in double for n <= 16.
std::vector<double> subset_weights(int n) {
  std::vector<double> w(n);
  double binom = 1.0;  // C(n-1, 0)
  for (int s = 0; s < n; ++s) {
    w[s] = 1.0 / (n * binom);
    binom = binom * (n - 1 - s) / (s + 1);
  }
  return w;
}

std::vector<int> other_indices(int n, int donor) {
  std::vector<int> d;
  d.reserve(n - 1);
  for (int k = 0; k < n; ++k)
    if (k != donor) d.push_back(k);
  return d;
}

}  // namespace

double shapley_exact_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                        int exact_cap) {
  const int n = static_cast<int>(bundle.size());
  if (donor < 0 || donor >= n) throw InputError("shapley: donor index out of range");
  if (n > exact_cap)
    throw InputError("shapley: n=" + std::to_string(n) + " above exact-enumeration cap " +
                     std::to_string(exact_cap) + "; use the sampled oracle");
  const std::vector<int> others = other_indices(n, donor);
  const std::vector<double> w = subset_weights(n);

  // Gray-code walk over subsets of the other agents; one coordinate of the
  // scratch bundle toggles per step.
  std::vector<double> cur(n, 0.0);
  std::vector<bool> in(n, false);
  int size = 0;
  double acc = 0.0;
  const std::uint64_t total = std::uint64_t(1) << (n - 1);
  for (std::uint64_t k = 0;; ++k) {
    double base = u(cur);
    cur[donor] = bundle[donor];
    double with = u(cur);
    cur[donor] = 0.0;
    acc += w[size] * (with - base);
    if (k + 1 >= total) break;
    int bit = std::countr_zero(k + 1);
    int d = others[bit];
    if (in[d]) {
      cur[d] = 0.0;
      in[d] = false;
      --size;
    } else {
      cur[d] = bundle[d];
      in[d] = true;
      ++size;
    }
  }
  return acc;
}

double shapley_sampled_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                          int samples, std::uint64_t seed) {
  const int n = static_cast<int>(bundle.size());
  if (donor < 0 || donor >= n) throw InputError("shapley: donor index out of range");
  if (samples < 1) throw InputError("shapley: samples must be >= 1");
  Rng rng(seed);
  std::vector<int> perm(n);
  std::vector<double> cur(n);
  double acc = 0.0;
  for (int t = 0; t < samples; ++t) {
    for (int k = 0; k < n; ++k) perm[k] = k;
    rng.shuffle(perm);
    std::fill(cur.begin(), cur.end(), 0.0);
    for (int k = 0; k < n; ++k) {
      int a = perm[k];
      if (a == donor) break;
      cur[a] = bundle[a];
    }
    double base = u(cur);
    cur[donor] = bundle[donor];
    acc += u(cur) - base;
  }
  return acc / samples;
}

double proportional_share_fn(const UtilityFn& u, std::span<const double> bundle, int donor,
                             std::span<const double> column_weights) {
  const int n = static_cast<int>(bundle.size());
  if (donor < 0 || donor >= n) throw InputError("proportional: donor index out of range");
  double denom = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = column_weights.empty() ? 1.0 : column_weights[k];
    if (w < 0.0) throw InputError("proportional: negative weight");
    denom += w * bundle[k];
  }
  double uj = u(bundle);
  if (denom == 0.0) {
    if (uj > 1e-12)
      throw InvariantError("proportional: positive utility with zero weighted support");
    return 0.0;
  }
  double w = column_weights.empty() ? 1.0 : column_weights[donor];
  return uj * (w * bundle[donor]) / denom;
}

// ---------------------------------------------------------------------------
// ShareEvaluator

ShareEvaluator::ShareEvaluator(const Instance& inst, const ShareOracle& oracle)
    : inst_(inst), oracle_(oracle), memo_(inst.n) {}

double ShareEvaluator::receiver_utility(std::span<const double> bundle, int j) const {
  ++evals_;
  double u = eval_utility(inst_.utilities[j], bundle);
  if (oracle_.perturbed) {
    double s = 0.0;
    for (double b : bundle) s += b;
    u += (oracle_.eps / oracle_.n) * s;
  }
  return u;
}

ColumnShares ShareEvaluator::column(const ExchangeMatrix& x, int j) const {
  std::vector<double> b = x.bundle(j);
  auto& slot = memo_[j];
  if (!slot.first.empty() && slot.first == b) return slot.second;
  ColumnShares out = column_from_bundle(b, j);
  slot.first = std::move(b);
  slot.second = out;
  return out;
}

ColumnShares ShareEvaluator::column_from_bundle(std::span<const double> bundle, int j) const {
  ColumnShares out;
  switch (oracle_.rule.kind) {
    case ShareRuleKind::shapley_exact: out = exact_column(bundle, j); break;
    case ShareRuleKind::shapley_sampled: out = sampled_column(bundle, j); break;
    case ShareRuleKind::proportional: out = proportional_column(bundle, j); break;
  }
  if (oracle_.perturbed) {
    const double slope = oracle_.eps / oracle_.n;
    double s = 0.0;
    for (int i = 0; i < inst_.n; ++i) {
      out.psi[i] += slope * bundle[i];
      s += bundle[i];
    }
    out.u_j += slope * s;
  }
  return out;
}

ColumnShares ShareEvaluator::exact_column(std::span<const double> bundle, int j) const {
  const int n = inst_.n;
  if (n > oracle_.rule.exact_cap)
    throw InputError("shapley: n=" + std::to_string(n) + " above exact-enumeration cap " +
                     std::to_string(oracle_.rule.exact_cap) + "; use the sampled oracle");
  const UtilitySpec& spec = inst_.utilities[j];
  ColumnShares out;
  out.psi.assign(n, 0.0);
  out.u_j = eval_utility(spec, bundle);
  ++evals_;
  const std::vector<double> w = subset_weights(n);
  const std::uint64_t total = std::uint64_t(1) << (n - 1);

  if (const auto* add = std::get_if<AdditiveUtility>(&spec)) {
    // Constant marginals collapse the subset average to the additive term.
    for (int i = 0; i < n; ++i)
      if (i != j) out.psi[i] = add->weights[i] * bundle[i];
    return out;
  }

  if (const auto* cs = std::get_if<ConcaveOfSumUtility>(&spec)) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const std::vector<int> others = other_indices(n, i);
      const double wi = cs->weights[i] * bundle[i];
      double inc = 0.0;
      std::vector<bool> in(n, false);
      int size = 0;
      double acc = 0.0;
      for (std::uint64_t k = 0;; ++k) {
        acc += w[size] * (std::sqrt(inc + wi + cs->smoothing) - std::sqrt(inc + cs->smoothing));
        if (k + 1 >= total) break;
        int d = others[std::countr_zero(k + 1)];
        double term = cs->weights[d] * bundle[d];
        if (in[d]) {
          inc -= term;
          in[d] = false;
          --size;
        } else {
          inc += term;
          in[d] = true;
          ++size;
        }
      }
      out.psi[i] = cs->scale * acc;
      evals_ += total;
    }
    return out;
  }

  const auto& cov = std::get<CoverageUtility>(spec);
  const int T = static_cast<int>(cov.topic_values.size());
  // Per-column factors: one_minus[d][t] = 1 - p_dt * b_d.
  std::vector<double> one_minus(static_cast<size_t>(n) * T);
  for (int d = 0; d < n; ++d)
    for (int t = 0; t < T; ++t)
      one_minus[static_cast<size_t>(d) * T + t] = 1.0 - cov.hit_probabilities[d][t] * bundle[d];

  std::vector<double> gain(T);   // v_t * p_it * b_i for the current donor
  std::vector<double> miss(T);   // product of nonzero factors over included donors
  std::vector<int> zeros(T);     // count of exactly-zero factors included
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    for (int t = 0; t < T; ++t)
      gain[t] = cov.topic_values[t] * cov.hit_probabilities[i][t] * bundle[i];
    std::fill(miss.begin(), miss.end(), 1.0);
    std::fill(zeros.begin(), zeros.end(), 0);
    const std::vector<int> others = other_indices(n, i);
    std::vector<bool> in(n, false);
    int size = 0;
    double acc = 0.0;
    for (std::uint64_t k = 0;; ++k) {
      double marg = 0.0;
      for (int t = 0; t < T; ++t) marg += gain[t] * (zeros[t] == 0 ? miss[t] : 0.0);
      acc += w[size] * marg;
      if (k + 1 >= total) break;
      int d = others[std::countr_zero(k + 1)];
      const double* f = &one_minus[static_cast<size_t>(d) * T];
      if (in[d]) {
        for (int t = 0; t < T; ++t) {
          if (f[t] == 0.0) --zeros[t];
          else miss[t] /= f[t];
        }
        in[d] = false;
        --size;
      } else {
        for (int t = 0; t < T; ++t) {
          if (f[t] == 0.0) ++zeros[t];
          else miss[t] *= f[t];
        }
        in[d] = true;
        ++size;
      }
    }
    out.psi[i] = acc;
    evals_ += total;
  }
  return out;
}

ColumnShares ShareEvaluator::sampled_column(std::span<const double> bundle, int j) const {
  const int n = inst_.n;
  const int m = oracle_.rule.samples;
  if (m < 1) throw InputError("shapley: samples must be >= 1");
  const UtilitySpec& spec = inst_.utilities[j];
  ColumnShares out;
  out.psi.assign(n, 0.0);
  out.u_j = eval_utility(spec, bundle);
  ++evals_;

  // One shuffled permutation stream per column; all donors share the same
  // permutations, so the per-sample marginals telescope to u_j exactly and
  // efficiency holds per seed, not just in expectation.
  Rng rng(mix_seed(oracle_.rule.seed, static_cast<std::uint64_t>(j)));
  std::vector<int> perm(n);
  std::vector<double> cur(n);
  for (int t = 0; t < m; ++t) {
    for (int k = 0; k < n; ++k) perm[k] = k;
    rng.shuffle(perm);
    std::fill(cur.begin(), cur.end(), 0.0);
    double prev = 0.0;  // u_j of the empty bundle (normalization)
    for (int k = 0; k < n; ++k) {
      int a = perm[k];
      cur[a] = bundle[a];
      double now = eval_utility(spec, cur);
      ++evals_;
      out.psi[a] += now - prev;
      prev = now;
    }
  }
  for (int i = 0; i < n; ++i) out.psi[i] /= m;
  out.psi[j] = 0.0;  // null coordinate; re-zero to drop accumulated roundoff
  return out;
}

ColumnShares ShareEvaluator::proportional_column(std::span<const double> bundle, int j) const {
  const int n = inst_.n;
  ColumnShares out;
  out.psi.assign(n, 0.0);
  out.u_j = eval_utility(inst_.utilities[j], bundle);
  ++evals_;
  double denom = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = oracle_.rule.weights.empty() ? 1.0 : oracle_.rule.weights[static_cast<size_t>(k) * n + j];
    denom += w * bundle[k];
  }
  if (denom == 0.0) {
    if (out.u_j > 1e-12)
      throw InvariantError("proportional: positive utility with zero weighted support");
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    double w = oracle_.rule.weights.empty() ? 1.0 : oracle_.rule.weights[static_cast<size_t>(i) * n + j];
    out.psi[i] = out.u_j * (w * bundle[i]) / denom;
  }
  return out;
}

double ShareEvaluator::single(std::span<const double> bundle, int donor, int j) const {
  return column_from_bundle(bundle, j).psi[donor];
}

OwnEntryCurve ShareEvaluator::own_entry_curve(std::span<const double> bundle, int donor, int j) const {
  const int n = inst_.n;
  const UtilitySpec& spec = inst_.utilities[j];
  const double pert = oracle_.perturbed ? oracle_.eps / oracle_.n : 0.0;

  if (oracle_.rule.kind == ShareRuleKind::proportional) {
    std::vector<double> b(bundle.begin(), bundle.end());
    std::vector<double> wcol(n, 1.0);
    if (!oracle_.rule.weights.empty())
      for (int k = 0; k < n; ++k) wcol[k] = oracle_.rule.weights[static_cast<size_t>(k) * n + j];
    const UtilitySpec* sp = &spec;
    return OwnEntryCurve([b, wcol, sp, donor, pert](double r) mutable {
      b[donor] = r;
      double denom = 0.0;
      for (size_t k = 0; k < b.size(); ++k) denom += wcol[k] * b[k];
      double uj = eval_utility(*sp, b);
      double base;
      if (denom == 0.0) {
        if (uj > 1e-12)
          throw InvariantError("proportional: positive utility with zero weighted support");
        base = 0.0;
      } else {
        base = uj * (wcol[donor] * r) / denom;
      }
      return base + pert * r;
    });
  }

  if (oracle_.rule.kind == ShareRuleKind::shapley_exact) {
    if (n > oracle_.rule.exact_cap)
      throw InputError("shapley: n above exact-enumeration cap; use the sampled oracle");
    const std::vector<double> w = subset_weights(n);
    const std::uint64_t total = std::uint64_t(1) << (n - 1);
    const std::vector<int> others = other_indices(n, donor);

    if (const auto* add = std::get_if<AdditiveUtility>(&spec)) {
      const double a = add->weights[donor] + pert;
      return OwnEntryCurve([a](double r) { return a * r; });
    }

    if (const auto* cs = std::get_if<ConcaveOfSumUtility>(&spec)) {
      // Subset base sums are independent of the donor's own entry.
      std::vector<double> wsub(total), ssub(total);
      double inc = 0.0;
      std::vector<bool> in(n, false);
      int size = 0;
      for (std::uint64_t k = 0;; ++k) {
        wsub[k] = w[size];
        ssub[k] = inc + cs->smoothing;
        if (k + 1 >= total) break;
        int d = others[std::countr_zero(k + 1)];
        double term = cs->weights[d] * bundle[d];
        if (in[d]) {
          inc -= term;
          in[d] = false;
          --size;
        } else {
          inc += term;
          in[d] = true;
          ++size;
        }
      }
      evals_ += total;
      const double wi = cs->weights[donor];
      const double scale = cs->scale;
      return OwnEntryCurve([wsub = std::move(wsub), ssub = std::move(ssub), wi, scale,
                            pert](double r) {
        double acc = 0.0;
        for (size_t k = 0; k < wsub.size(); ++k)
          acc += wsub[k] * (std::sqrt(ssub[k] + wi * r) - std::sqrt(ssub[k]));
        return scale * acc + pert * r;
      });
    }

    // Coverage: each subset's marginal is linear in the donor's entry, so the
    // whole Shapley share is a single linear coefficient.
    const auto& cov = std::get<CoverageUtility>(spec);
    const int T = static_cast<int>(cov.topic_values.size());
    std::vector<double> gain(T), miss(T, 1.0);
    std::vector<int> zeros(T, 0);
    for (int t = 0; t < T; ++t) gain[t] = cov.topic_values[t] * cov.hit_probabilities[donor][t];
    std::vector<bool> in(n, false);
    int size = 0;
    double coef = 0.0;
    for (std::uint64_t k = 0;; ++k) {
      double m = 0.0;
      for (int t = 0; t < T; ++t) m += gain[t] * (zeros[t] == 0 ? miss[t] : 0.0);
      coef += w[size] * m;
      if (k + 1 >= total) break;
      int d = others[std::countr_zero(k + 1)];
      if (in[d]) {
        for (int t = 0; t < T; ++t) {
          double f = 1.0 - cov.hit_probabilities[d][t] * bundle[d];
          if (f == 0.0) --zeros[t];
          else miss[t] /= f;
        }
        in[d] = false;
        --size;
      } else {
        for (int t = 0; t < T; ++t) {
          double f = 1.0 - cov.hit_probabilities[d][t] * bundle[d];
          if (f == 0.0) ++zeros[t];
          else miss[t] *= f;
        }
        in[d] = true;
        ++size;
      }
    }
    evals_ += total;
    const double a = coef + pert;
    return OwnEntryCurve([a](double r) { return a * r; });
  }

  // Sampled: fixed permutations; the donor's predecessor prefix per sample is
  // independent of its own entry.
  const int m = oracle_.rule.samples;
  Rng rng(mix_seed(oracle_.rule.seed, static_cast<std::uint64_t>(j)));
  std::vector<int> perm(n);
  std::vector<double> cur(n);

  if (const auto* add = std::get_if<AdditiveUtility>(&spec)) {
    const double a = add->weights[donor] + pert;
    return OwnEntryCurve([a](double r) { return a * r; });
  }

  if (const auto* cs = std::get_if<ConcaveOfSumUtility>(&spec)) {
    std::vector<double> prefix(m);
    for (int t = 0; t < m; ++t) {
      for (int k = 0; k < n; ++k) perm[k] = k;
      rng.shuffle(perm);
      double inc = 0.0;
      for (int k = 0; k < n; ++k) {
        int a = perm[k];
        if (a == donor) break;
        inc += cs->weights[a] * bundle[a];
      }
      prefix[t] = inc + cs->smoothing;
    }
    const double wi = cs->weights[donor];
    const double scale = cs->scale;
    return OwnEntryCurve([prefix = std::move(prefix), wi, scale, pert, m](double r) {
      double acc = 0.0;
      for (double p : prefix) acc += std::sqrt(p + wi * r) - std::sqrt(p);
      return scale * acc / m + pert * r;
    });
  }

  const auto& cov = std::get<CoverageUtility>(spec);
  const int T = static_cast<int>(cov.topic_values.size());
  double coef = 0.0;
  std::vector<double> miss(T);
  for (int t = 0; t < m; ++t) {
    for (int k = 0; k < n; ++k) perm[k] = k;
    rng.shuffle(perm);
    std::fill(miss.begin(), miss.end(), 1.0);
    for (int k = 0; k < n; ++k) {
      int a = perm[k];
      if (a == donor) break;
      for (int tt = 0; tt < T; ++tt) miss[tt] *= 1.0 - cov.hit_probabilities[a][tt] * bundle[a];
    }
    for (int tt = 0; tt < T; ++tt)
      coef += cov.topic_values[tt] * cov.hit_probabilities[donor][tt] * miss[tt];
  }
  const double a = coef / m + pert;
  return OwnEntryCurve([a](double r) { return a * r; });
}

}  // namespace fairx
