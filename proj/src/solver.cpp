#include "fairx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairx/errors.hpp"

namespace fairx {

namespace {

std::vector<int> complement_of(const std::vector<int>& s, int n) {
  std::vector<bool> in(n, false);
  for (int v : s) in[v] = true;
  std::vector<int> rest;
  rest.reserve(n - s.size());
  for (int v = 0; v < n; ++v)
    if (!in[v]) rest.push_back(v);
  return rest;
}

void assert_acyclic(const ExchangeMatrix& x, const SolverConstants& c) {
  ExchangeGraph g = build_exchange_graph(x, c.graph_alpha);
  TopoResult t = topological_order(g);
  if (!t.acyclic) {
    std::string cyc;
    for (int v : t.cycle) cyc += std::to_string(v) + " ";
    throw InvariantError("solver: exchange graph acquired a cycle: " + cyc);
  }
}

}  // namespace

std::vector<int> select_high_surplus_set(const SurplusProfile& profile, double eps, int n) {
  const double gap = eps / (double(n) * n);
  if (!(profile.max_delta() > eps / n))
    throw InputError("select_high_surplus_set: requires max surplus > eps/n");

  // S is a prefix of the descending sorted view: the next agent joins while
  // its surplus is within eps/n^2 of the current minimum in S.
  std::vector<int> s{profile.sorted_view[0]};
  double min_in_s = profile.delta[s[0]];
  for (int k = 1; k < n; ++k) {
    int cand = profile.sorted_view[k];
    if (profile.delta[cand] >= min_in_s - gap) {
      s.push_back(cand);
      min_in_s = profile.delta[cand];
    } else {
      break;
    }
  }
  if (static_cast<int>(s.size()) == n)
    throw InvariantError("select_high_surplus_set: S grew to all agents; gap condition never broke");
  for (int v : s)
    if (!(profile.delta[v] > 0.0))
      throw InvariantError("select_high_surplus_set: member " + std::to_string(v) +
                           " has non-positive surplus");
  std::sort(s.begin(), s.end());
  return s;
}

int find_receiver(const SurplusProfile& profile, const std::vector<int>& s, double eps, int n) {
  std::vector<bool> in(n, false);
  for (int v : s) in[v] = true;
  int best = -1;
  double best_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (in[j]) continue;
    double sum = 0.0;
    for (int i : s) sum += profile.psi(i, j);
    if (best < 0 || sum > best_sum) {
      best = j;
      best_sum = sum;
    }
  }
  if (best < 0) throw InputError("find_receiver: S covers all agents");
  if (!(best_sum > eps / (double(n) * n)))
    throw InvariantError("find_receiver: no column receives more than eps/n^2 from S (" +
                         std::to_string(best_sum) + "); share oracle or precondition broken");
  return best;
}

double binary_search_reduction_core(const OwnEntryCurve& curve, double cur_r, double delta_at_cur,
                                    double psi_at_cur, double floor_surplus, double tol_bs) {
  if (!(cur_r > 0.0)) throw InputError("binary_search_reduction: entry already zero");
  if (delta_at_cur < floor_surplus - 1e-12)
    throw InputError("binary_search_reduction: surplus already below floor");

  const double base = delta_at_cur - psi_at_cur;  // delta with the psi_ij term removed
  auto delta_at = [&](double r) { return base + curve(r); };

  double g_zero = delta_at(0.0);
  if (g_zero >= floor_surplus) return 0.0;

  double lo = 0.0, hi = cur_r;
  double g_lo = g_zero, g_hi = delta_at(cur_r);
  while (hi - lo > tol_bs) {
    double mid = 0.5 * (lo + hi);
    double gm = delta_at(mid);
    if (gm > g_hi + 1e-7 || gm < g_lo - 1e-7)
      throw InvariantError("binary_search_reduction: non-monotone surplus during bracketing; "
                           "share rule violates cross-monotonicity assumptions");
    if (gm >= floor_surplus) {
      hi = mid;
      g_hi = gm;
    } else {
      lo = mid;
      g_lo = gm;
    }
  }
  return hi;
}

double binary_search_reduction(const ExchangeMatrix& x, int i, int j, double floor_surplus,
                               const ShareEvaluator& eval, double tol_bs) {
  const int n = x.n();
  if (i == j) throw InputError("binary_search_reduction: diagonal entry");
  // Delta_i assembled column by column; only column j varies below.
  double out_flow = 0.0, psi_ij = 0.0;
  for (int col = 0; col < n; ++col) {
    if (col == i) continue;
    double p = eval.column(x, col).psi[i];
    out_flow += p;
    if (col == j) psi_ij = p;
  }
  std::vector<double> own = x.bundle(i);
  double delta_i = out_flow - eval.receiver_utility(own, i);
  std::vector<double> bj = x.bundle(j);
  OwnEntryCurve curve = eval.own_entry_curve(bj, i, j);
  return binary_search_reduction_core(curve, x(i, j), delta_i, psi_ij, floor_surplus, tol_bs);
}

void increase_flow_step(ExchangeMatrix& x, int j, int i, const SolverConstants& c) {
  const double cur = x(j, i);
  if (!(cur < 1.0 - c.graph_alpha))
    throw InputError("increase_flow_step: x_ji not below 1 - eps/(nL); edge not in exchange graph");
  double next = cur + c.increase_step;
  if (next > 1.0)
    throw InvariantError("increase_flow_step: step clamped at 1; headroom invariant broken");
  x.set(j, i, next);
}

int decrease_flow_phase(ExchangeMatrix& x, const std::vector<int>& s, int j,
                        const ShareEvaluator& eval, const SolverConstants& c,
                        SurplusProfile& profile, SolverTrace* trace, std::uint64_t outer_iter) {
  const int n = x.n();
  std::vector<bool> in_s(n, false);
  for (int v : s) in_s[v] = true;
  if (in_s[j]) throw InputError("decrease_flow_phase: receiver inside S");

  // Floors are frozen at phase entry.
  std::vector<double> floor_of(n, 0.0);
  for (int i : s) floor_of[i] = profile.delta[i] - c.eps_over_2n3;
  const std::vector<double> start_delta = profile.delta;

  int inner = 0;
  for (;;) {
    int pick = -1;
    double best_gap = c.eps_over_4n3;
    for (int i : s) {
      double gap = profile.delta[i] - floor_of[i];
      if (gap > best_gap && x(i, j) > 0.0) {
        pick = i;
        best_gap = gap;
      }
    }
    if (pick < 0) break;
    if (static_cast<double>(++inner) > c.phase_iter_bound)
      throw InvariantError("decrease_flow_phase: inner iterations exceeded 4n^4L/eps + n");

    std::vector<double> bj = x.bundle(j);
    OwnEntryCurve curve = eval.own_entry_curve(bj, pick, j);
    double r = binary_search_reduction_core(curve, x(pick, j), profile.delta[pick],
                                            profile.psi(pick, j), floor_of[pick], c.tol_bs);
    TraceStep step;
    step.kind = StepKind::decrease_flow;
    step.outer_iter = outer_iter;
    step.from = pick;
    step.to = j;
    step.old_value = x(pick, j);
    step.new_value = r;
    if (trace != nullptr) step.surplus_before = profile.delta;

    if (r > step.old_value)
      throw InvariantError("decrease_flow_phase: binary search returned an increase");
    x.set(pick, j, r);
    profile = recompute_surplus_after_column_change(profile, eval, x, j);

    if (trace != nullptr) {
      step.surplus_after = profile.delta;
      step.acyclic_attested = is_acyclic(build_exchange_graph(x, c.graph_alpha));
      trace->steps.push_back(std::move(step));
    }
  }

  // Phase postconditions, with slack L*tol_bs on the surplus landings.
  const double slack = c.lipschitz * c.tol_bs;
  bool one_dropped = false;
  for (int i : s) {
    if (profile.delta[i] > start_delta[i] + slack)
      throw InvariantError("decrease_flow_phase: surplus of S-agent " + std::to_string(i) +
                           " increased");
    if (start_delta[i] - profile.delta[i] >= c.eps_over_4n3 - slack) one_dropped = true;
  }
  if (inner > 0 && !one_dropped)
    throw InvariantError("decrease_flow_phase: no S-surplus dropped by eps/4n^3");
  double min_s = std::numeric_limits<double>::infinity();
  double max_rest = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (in_s[i]) min_s = std::min(min_s, profile.delta[i]);
    else max_rest = std::max(max_rest, profile.delta[i]);
  }
  if (!(max_rest < min_s))
    throw InvariantError("decrease_flow_phase: an outside agent reached the surplus of S");
  for (int i = 0; i < n; ++i)
    if (!in_s[i] && profile.delta[i] < start_delta[i] - slack)
      throw InvariantError("decrease_flow_phase: surplus outside S decreased");
  return inner;
}

SolverResult run_local_search(const Instance& inst, const SolverConfig& cfg) {
  Instance work = inst;
  if (cfg.epsilon != 0.0) work.epsilon = cfg.epsilon;
  if (cfg.lipschitz != 0.0) work.lipschitz = cfg.lipschitz;
  if (cfg.seed != 0) work.share_rule.seed = cfg.seed;
  work.validate();

  if (work.share_rule.kind == ShareRuleKind::proportional && !cfg.allow_noncrossmonotone)
    throw InputError("solver: proportional shares are not cross-monotone; "
                     "pass --allow-noncrossmonotone to run anyway");

  const int n = work.n;
  const SolverConstants c = SolverConstants::derive(n, work.epsilon, work.lipschitz);
  const std::uint64_t max_outer = cfg.max_outer_iters > 0 ? cfg.max_outer_iters : c.max_outer_default;

  ShareOracle oracle = ShareOracle::perturbed_of(work);
  ShareEvaluator eval(work, oracle);

  SolverResult res;
  res.x_final = ExchangeMatrix::ones_off_diagonal(n);
  ExchangeMatrix& x = res.x_final;
  SurplusProfile profile = compute_surplus(eval, x);

  res.trace.constants = c;
  res.trace.initial_surplus = profile.delta;
  res.trajectory.push_back(profile.sorted_deltas());
  SolverTrace* trace = cfg.record_trace ? &res.trace : nullptr;

  std::uint64_t outer = 0;
  res.status = SolverStatus::max_iters_exceeded;
  for (;;) {
    if (!(profile.max_delta() > c.eps_over_n)) {
      res.status = SolverStatus::converged;
      break;
    }
    if (outer >= max_outer) break;

    std::vector<int> s = select_high_surplus_set(profile, work.epsilon, n);
    std::vector<int> rest = complement_of(s, n);
    ExchangeGraph g = build_exchange_graph(x, c.graph_alpha);
    auto crossing = edges_from_to(g, rest, s);

    const std::vector<double> sorted_before = profile.sorted_deltas();

    TraceStep sel;
    sel.kind = StepKind::select_s;
    sel.outer_iter = outer;
    sel.selected_set = s;
    if (trace != nullptr) {
      sel.surplus_before = profile.delta;
      sel.surplus_after = profile.delta;
      sel.acyclic_attested = topological_order(g).acyclic;
    }

    double progress_slack = c.lex_fp_slack;
    if (!crossing.empty()) {
      auto [ej, ei] = crossing.front();
      sel.step_case = StepCase::increase_edge;
      sel.from = ej;
      sel.to = ei;
      if (trace != nullptr) trace->steps.push_back(sel);

      TraceStep step;
      step.kind = StepKind::increase_flow;
      step.outer_iter = outer;
      step.from = ej;
      step.to = ei;
      step.old_value = x(ej, ei);
      if (trace != nullptr) step.surplus_before = profile.delta;
      increase_flow_step(x, ej, ei, c);
      step.new_value = x(ej, ei);
      profile = recompute_surplus_after_column_change(profile, eval, x, ei);
      if (trace != nullptr) {
        step.surplus_after = profile.delta;
        step.acyclic_attested = is_acyclic(build_exchange_graph(x, c.graph_alpha));
        trace->steps.push_back(std::move(step));
      }
    } else {
      int j = find_receiver(profile, s, work.epsilon, n);
      sel.step_case = StepCase::decrease_phase;
      sel.receiver = j;
      if (trace != nullptr) trace->steps.push_back(sel);
      decrease_flow_phase(x, s, j, eval, c, profile, trace, outer);
      // Binary-search landing error is bounded by L*tol_bs per agent; the
      // guaranteed drop eps/4n^3 dominates the wider slack.
      progress_slack = c.lex_slack;
    }

    ++outer;
    res.trajectory.push_back(profile.sorted_deltas());

    if (cfg.check_invariants) {
      assert_acyclic(x, c);
      if (lex_compare(profile.sorted_deltas(), sorted_before, progress_slack) != LexOrder::less ||
          lex_compare(profile.sorted_deltas(), sorted_before, c.lex_fp_slack) != LexOrder::less)
        throw InvariantError("solver: sorted surplus profile failed to decrease at iteration " +
                             std::to_string(outer - 1));
    }
  }

  res.outer_iterations = outer;
  res.surplus_perturbed = profile.delta;

  ShareOracle plain = ShareOracle::plain(work);
  ShareEvaluator plain_eval(work, plain);
  SurplusProfile orig = compute_surplus(plain_eval, x);
  res.surplus_original = orig.delta;

  double max_abs = 0.0;
  for (double d : orig.delta) max_abs = std::max(max_abs, std::abs(d));
  res.certified_reciprocal_3eps =
      res.status == SolverStatus::converged && max_abs <= 3.0 * work.epsilon;
  res.certified_graph_acyclic = is_acyclic(build_exchange_graph(x, c.graph_alpha));
  return res;
}

}  // namespace fairx
