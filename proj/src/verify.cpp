#include "fairx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairx/constants.hpp"
#include "fairx/errors.hpp"
#include "fairx/graph.hpp"
#include "fairx/parallel.hpp"
#include "fairx/rng.hpp"
#include "fairx/surplus.hpp"

namespace fairx {

ReciprocityCheck check_reciprocity(const Instance& inst, const ExchangeMatrix& x, double delta) {
  ShareEvaluator eval(inst, ShareOracle::plain(inst));
  SurplusProfile p = compute_surplus(eval, x);
  ReciprocityCheck out;
  out.surplus = p.delta;
  for (double d : p.delta) out.max_abs_surplus = std::max(out.max_abs_surplus, std::abs(d));
  out.pass = out.max_abs_surplus <= delta;
  return out;
}

namespace {

// Lexicographic combinations of size k from [n]: {0,1},{0,2},...,{1,2},...
void combinations_of_size(int n, int k, std::vector<std::uint32_t>& out) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    std::uint32_t mask = 0;
    for (int v : idx) mask |= (1u << v);
    out.push_back(mask);
    int p = k - 1;
    while (p >= 0 && idx[p] == n - k + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
}

}  // namespace

CoreStabilityCheck check_core_stability_bruteforce(const Instance& inst, const ExchangeMatrix& x,
                                                   double eps) {
  const int n = inst.n;
  if (n > 20) throw InputError("core check: n > 20 exceeds the brute-force coalition cap");

  CoreStabilityCheck out;
  out.requested_eps = eps;

  std::vector<double> have(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> b = x.bundle(i);
    have[i] = eval_utility(inst.utilities[i], b);
  }

  std::vector<std::uint32_t> masks;
  masks.reserve((std::size_t(1) << n) - 1);
  for (int k = 1; k <= n; ++k) combinations_of_size(n, k, masks);

  // min member gain under full internal sharing, per coalition.
  std::vector<double> min_gain(masks.size());
  parallel_chunks(masks.size(), 16, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> bundle(n);
    for (std::size_t m = b; m < e; ++m) {
      std::uint32_t mask = masks[m];
      double mg = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (!((mask >> i) & 1u)) continue;
        for (int k = 0; k < n; ++k)
          bundle[k] = (k != i && ((mask >> k) & 1u)) ? 1.0 : 0.0;
        mg = std::min(mg, eval_utility(inst.utilities[i], bundle) - have[i]);
      }
      min_gain[m] = mg;
    }
  });

  long long first_block = -1;
  for (std::size_t m = 0; m < masks.size(); ++m) {
    out.core_stable_at = std::max(out.core_stable_at, min_gain[m]);
    if (first_block < 0 && min_gain[m] > eps) first_block = static_cast<long long>(m);
  }

  if (first_block >= 0) {
    out.pass = false;
    BlockingWitness w;
    std::uint32_t mask = masks[first_block];
    std::vector<double> bundle(n);
    for (int i = 0; i < n; ++i) {
      if (!((mask >> i) & 1u)) continue;
      w.coalition.push_back(i);
      for (int k = 0; k < n; ++k)
        bundle[k] = (k != i && ((mask >> k) & 1u)) ? 1.0 : 0.0;
      w.gains.push_back(eval_utility(inst.utilities[i], bundle) - have[i]);
    }
    out.witness = std::move(w);
  } else {
    out.pass = true;
  }
  return out;
}

std::vector<AxiomResult> audit_share_axioms_fn(int n, const ColumnShareFn& shares,
                                               bool cross_guaranteed, int trials,
                                               std::uint64_t seed) {
  if (trials < 1) throw InputError("audit: trials must be >= 1");
  Rng rng(seed);
  const double h = 1e-3;

  double r_eff = 0.0, r_norm = 0.0, r_mono = 0.0, r_cross = 0.0;
  for (int t = 0; t < trials; ++t) {
    ExchangeMatrix x(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) x.set(i, j, rng.uniform(0.0, 1.0 - h));

    for (int j = 0; j < n; ++j) {
      ColumnShares col = shares(x, j);
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += col.psi[i];
      r_eff = std::max(r_eff, std::abs(sum - col.u_j));
    }

    int i = static_cast<int>(rng.below(n));
    int j = static_cast<int>(rng.below(n));
    if (i == j) j = (j + 1) % n;
    int i2 = static_cast<int>(rng.below(n));
    if (i2 == i || i2 == j) i2 = -1;

    // normalization at a zeroed entry
    double keep = x(i, j);
    x.set(i, j, 0.0);
    r_norm = std::max(r_norm, std::abs(shares(x, j).psi[i]));
    x.set(i, j, keep);

    // monotonicity in the own entry
    double before = shares(x, j).psi[i];
    x.set(i, j, keep + h);
    double after = shares(x, j).psi[i];
    x.set(i, j, keep);
    r_mono = std::max(r_mono, before - after);

    // cross-monotonicity against another donor's entry
    if (i2 >= 0) {
      double keep2 = x(i2, j);
      x.set(i2, j, keep2 + h);
      double after_cross = shares(x, j).psi[i];
      x.set(i2, j, keep2);
      r_cross = std::max(r_cross, after_cross - before);
    }
  }

  std::vector<AxiomResult> out;
  out.push_back({"efficiency", true, r_eff <= 1e-9, r_eff});
  out.push_back({"normalization", true, r_norm == 0.0, r_norm});
  out.push_back({"monotonicity", true, r_mono <= 1e-9, r_mono});
  out.push_back({"cross_monotonicity", cross_guaranteed, r_cross <= 1e-9, r_cross});
  return out;
}

std::vector<AxiomResult> audit_share_axioms(const Instance& inst, const ShareOracle& oracle,
                                            int trials, std::uint64_t seed) {
  ShareEvaluator eval(inst, oracle);
  ColumnShareFn fn = [&eval](const ExchangeMatrix& x, int j) { return eval.column(x, j); };
  return audit_share_axioms_fn(inst.n, fn, oracle.rule.kind != ShareRuleKind::proportional,
                               trials, seed);
}

namespace {

bool same_vec(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

std::vector<double> sorted_desc(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end(), std::greater<double>());
  return s;
}

TraceCheck fail(long long step, const std::string& why) {
  return TraceCheck{false, step, why};
}

}  // namespace

TraceCheck validate_trace(const SolverTrace& trace, const Instance& inst) {
  const SolverConstants& c = trace.constants;
  const int n = c.n;
  if (n != inst.n) return fail(-1, "constants/instance agent count mismatch");
  const double slack = c.lipschitz * c.tol_bs;

  ExchangeMatrix x = ExchangeMatrix::ones_off_diagonal(n);
  std::vector<double> cur = trace.initial_surplus;
  if (static_cast<int>(cur.size()) != n) return fail(-1, "initial surplus has wrong length");

  // Open phase bookkeeping.
  bool in_phase = false;
  StepCase phase_case = StepCase::none;
  std::vector<int> phase_set;
  int phase_receiver = -1;
  std::vector<double> phase_start;
  long long phase_start_step = -1;
  int phase_inner = 0;

  auto close_phase = [&]() -> TraceCheck {
    if (!in_phase) return {true, -1, ""};
    // Lexicographic progress across the whole outer iteration.
    std::vector<double> before = sorted_desc(phase_start);
    std::vector<double> after = sorted_desc(cur);
    if (lex_compare(after, before, c.lex_fp_slack) != LexOrder::less)
      return fail(phase_start_step, "sorted surplus profile did not strictly decrease");
    if (phase_case == StepCase::decrease_phase) {
      if (lex_compare(after, before, c.lex_slack) != LexOrder::less)
        return fail(phase_start_step, "decrease phase: profile not lex-smaller at slack n*L*tol_bs");
      if (static_cast<double>(phase_inner) > c.phase_iter_bound)
        return fail(phase_start_step, "decrease phase exceeded inner-iteration bound");
      std::vector<bool> in_s(n, false);
      for (int v : phase_set) in_s[v] = true;
      bool dropped = false;
      for (int i : phase_set) {
        if (cur[i] > phase_start[i] + slack)
          return fail(phase_start_step, "decrease phase: S-surplus increased");
        if (phase_start[i] - cur[i] >= c.eps_over_4n3 - slack) dropped = true;
      }
      if (phase_inner > 0 && !dropped)
        return fail(phase_start_step, "decrease phase: no S-surplus dropped by eps/4n^3");
      double min_s = std::numeric_limits<double>::infinity();
      double max_rest = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (in_s[i]) min_s = std::min(min_s, cur[i]);
        else max_rest = std::max(max_rest, cur[i]);
      }
      if (!(max_rest < min_s))
        return fail(phase_start_step, "decrease phase: surplus crossed from outside S");
      for (int i = 0; i < n; ++i)
        if (!in_s[i] && cur[i] < phase_start[i] - slack)
          return fail(phase_start_step, "decrease phase: surplus outside S decreased");
    }
    in_phase = false;
    phase_inner = 0;
    return {true, -1, ""};
  };

  for (size_t si = 0; si < trace.steps.size(); ++si) {
    const TraceStep& st = trace.steps[si];
    const long long at = static_cast<long long>(si);
    if (!same_vec(st.surplus_before, cur)) return fail(at, "surplus snapshot does not chain");

    if (st.kind == StepKind::select_s) {
      TraceCheck closed = close_phase();
      if (!closed.pass) return closed;
      if (!same_vec(st.surplus_after, cur)) return fail(at, "select step mutated surpluses");
      in_phase = true;
      phase_case = st.step_case;
      phase_set = st.selected_set;
      phase_receiver = st.receiver;
      phase_start = cur;
      phase_start_step = at;
      phase_inner = 0;
      if (phase_set.empty()) return fail(at, "select step with empty S");
      continue;
    }

    if (!in_phase) return fail(at, "flow step before any select step");
    if (st.from < 0 || st.from >= n || st.to < 0 || st.to >= n || st.from == st.to)
      return fail(at, "flow step touches an invalid entry");
    if (x(st.from, st.to) != st.old_value) return fail(at, "flow step old value mismatch");

    if (st.kind == StepKind::increase_flow) {
      if (phase_case != StepCase::increase_edge) return fail(at, "increase step in a decrease phase");
      if (!(st.old_value < 1.0 - c.graph_alpha)) return fail(at, "increase step without graph edge");
      if (st.new_value != st.old_value + c.increase_step)
        return fail(at, "increase step size is not exactly eps/(n^3 L)");
    } else {
      if (phase_case != StepCase::decrease_phase) return fail(at, "decrease step in an increase phase");
      if (st.to != phase_receiver) return fail(at, "decrease step touches a different column");
      if (std::find(phase_set.begin(), phase_set.end(), st.from) == phase_set.end())
        return fail(at, "decrease step from an agent outside S");
      if (!(st.new_value <= st.old_value)) return fail(at, "decrease step increased the entry");
      ++phase_inner;
    }

    x.set(st.from, st.to, st.new_value);
    TopoResult topo = topological_order(build_exchange_graph(x, c.graph_alpha));
    if (!topo.acyclic) return fail(at, "exchange graph has a cycle after the step");
    if (!st.acyclic_attested) return fail(at, "step not attested acyclic");
    cur = st.surplus_after;
  }

  TraceCheck closed = close_phase();
  if (!closed.pass) return closed;

  // Re-derive the final surpluses from the reconstructed exchange.
  ShareEvaluator eval(inst, ShareOracle::perturbed_of(inst));
  SurplusProfile fresh = compute_surplus(eval, x);
  for (int i = 0; i < n; ++i)
    if (std::abs(fresh.delta[i] - cur[i]) > 1e-9)
      return fail(static_cast<long long>(trace.steps.size()) - 1,
                  "final surpluses diverge from recomputation on the reconstructed exchange");
  return {true, -1, ""};
}

VerificationReport verify_exchange(const Instance& inst, const ExchangeMatrix& x,
                                   double reciprocity_delta, double core_eps, int axiom_trials) {
  VerificationReport r;
  r.reciprocity = check_reciprocity(inst, x, reciprocity_delta);
  r.core = check_core_stability_bruteforce(inst, x, core_eps);
  r.axiom_results = audit_share_axioms(inst, ShareOracle::plain(inst), axiom_trials);
  return r;
}

}  // namespace fairx
