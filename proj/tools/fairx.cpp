// fairx: generate, solve, verify and inspect data-exchange instances.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairx/errors.hpp"
#include "fairx/io.hpp"
#include "fairx/json_writer.hpp"
#include "fairx/solver.hpp"
#include "fairx/verify.hpp"

using namespace fairx;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInputError = 3;

struct ShareRuleFlags {
  std::string rule = "";
  int samples = 0;

  void apply(Instance& inst, std::uint64_t seed) const {
    if (rule == "shapley") inst.share_rule.kind = ShareRuleKind::shapley_exact;
    else if (rule == "shapley-sampled") inst.share_rule.kind = ShareRuleKind::shapley_sampled;
    else if (rule == "proportional") inst.share_rule.kind = ShareRuleKind::proportional;
    else if (!rule.empty()) throw InputError("unknown --share-rule \"" + rule + "\"");
    if (samples > 0) inst.share_rule.samples = samples;
    if (inst.share_rule.kind == ShareRuleKind::shapley_sampled && inst.share_rule.samples < 1)
      inst.share_rule.samples = 1000;
    if (seed != 0) inst.share_rule.seed = seed;
  }
};

void add_share_flags(CLI::App* cmd, ShareRuleFlags& flags) {
  cmd->add_option("--share-rule", flags.rule, "shapley | shapley-sampled | proportional");
  cmd->add_option("--samples", flags.samples, "permutations per column for the sampled estimator");
}

int cmd_gen(const std::string& out_path, int n, const std::string& family, double eps,
            std::uint64_t seed, const ShareRuleFlags& share) {
  Instance inst = generate_instance(n, family, eps, seed);
  share.apply(inst, seed);
  inst.validate();
  std::string doc = instance_to_json(inst);
  if (out_path.empty()) {
    std::printf("%s\n", doc.c_str());
  } else {
    write_text_file(out_path, doc);
    std::printf("wrote %s (n=%d, family=%s, epsilon=%g, L=%g)\n", out_path.c_str(), n,
                family.c_str(), eps, inst.lipschitz);
  }
  return kExitOk;
}

int run_verify(const Instance& inst, const ExchangeMatrix& x, double eps,
               const std::string& out_path) {
  VerificationReport rep = verify_exchange(inst, x, eps, eps);
  std::printf("reciprocity at %.6g: %s (max |surplus| = %.6g)\n", eps,
              rep.reciprocity.pass ? "pass" : "FAIL", rep.reciprocity.max_abs_surplus);
  std::printf("core stability at %.6g: %s (stable from %.6g)\n", eps,
              rep.core.pass ? "pass" : "FAIL", rep.core.core_stable_at);
  if (rep.core.witness) {
    std::string members;
    for (int v : rep.core.witness->coalition) members += std::to_string(v) + " ";
    std::printf("blocking coalition: %s\n", members.c_str());
  }
  for (const auto& a : rep.axiom_results)
    std::printf("axiom %-18s %s (residual %.3g%s)\n", a.axiom.c_str(),
                a.pass ? "pass" : "FAIL", a.max_residual,
                a.guaranteed ? "" : ", informational");
  if (!out_path.empty()) {
    write_text_file(out_path, report_to_json(rep));
    std::printf("report written: %s\n", out_path.c_str());
  }
  return rep.reciprocity.pass && rep.core.pass ? kExitOk : kExitVerifyFailed;
}

int cmd_solve(const std::string& instance_path, const std::string& out_path,
              const std::string& trace_path, const std::string& csv_path, double eps_override,
              std::uint64_t seed, std::uint64_t max_iters, bool allow_ncm, bool verify_after,
              const ShareRuleFlags& share) {
  Instance inst = parse_instance_file(instance_path);
  share.apply(inst, seed);
  if (eps_override != 0.0) inst.epsilon = eps_override;
  inst.validate();

  SolverConfig cfg;
  cfg.max_outer_iters = max_iters;
  cfg.allow_noncrossmonotone = allow_ncm;
  cfg.record_trace = true;
  SolverResult res = run_local_search(inst, cfg);

  double max_abs = 0.0;
  for (double d : res.surplus_original) max_abs = std::max(max_abs, std::abs(d));
  std::printf("status: %s\n",
              res.status == SolverStatus::converged ? "converged" : "max_iters_exceeded");
  std::printf("outer iterations: %llu\n", (unsigned long long)res.outer_iterations);
  std::printf("max |surplus| on original utilities: %.6g (3*epsilon = %.6g)\n", max_abs,
              3 * inst.epsilon);
  std::printf("certified: reciprocal@3eps=%s, exchange graph acyclic=%s\n",
              res.certified_reciprocal_3eps ? "yes" : "no",
              res.certified_graph_acyclic ? "yes" : "no");

  if (!out_path.empty()) {
    write_text_file(out_path, result_to_json(res, inst));
    std::printf("result written: %s\n", out_path.c_str());
  }
  if (!trace_path.empty()) {
    write_text_file(trace_path, trace_to_jsonl(res.trace));
    std::printf("trace written: %s (%zu steps)\n", trace_path.c_str(), res.trace.steps.size());
  }
  if (!csv_path.empty()) {
    write_text_file(csv_path, trajectory_to_csv(res.trajectory));
    std::printf("trajectory written: %s\n", csv_path.c_str());
  }

  if (res.status != SolverStatus::converged) return kExitNotConverged;
  if (verify_after) return run_verify(inst, res.x_final, 3 * inst.epsilon, "");
  return kExitOk;
}

int cmd_verify_files(const std::string& instance_path, const std::string& exchange_path,
                     double eps, const std::string& out_path) {
  Instance inst = parse_instance_file(instance_path);
  ExchangeMatrix x = parse_exchange_file(exchange_path);
  if (x.n() != inst.n) throw InputError("exchange matrix size does not match the instance");
  double threshold = eps != 0.0 ? eps : 3 * inst.epsilon;
  return run_verify(inst, x, threshold, out_path);
}

int cmd_shapley(const std::string& instance_path, const std::string& exchange_path, int sampled_m,
                std::uint64_t seed, const std::string& out_path) {
  Instance inst = parse_instance_file(instance_path);
  if (sampled_m > 0) {
    inst.share_rule.kind = ShareRuleKind::shapley_sampled;
    inst.share_rule.samples = sampled_m;
    if (seed != 0) inst.share_rule.seed = seed;
  } else {
    inst.share_rule.kind = ShareRuleKind::shapley_exact;
  }
  ExchangeMatrix x = exchange_path.empty() ? ExchangeMatrix::ones_off_diagonal(inst.n)
                                           : parse_exchange_file(exchange_path);
  if (x.n() != inst.n) throw InputError("exchange matrix size does not match the instance");

  ShareEvaluator eval(inst, ShareOracle::plain(inst));
  const int n = inst.n;
  std::vector<ColumnShares> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = eval.column(x, j);

  std::printf("share matrix psi_ij (row = donor, column = receiver):\n");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) std::printf("%12.6f", cols[j].psi[i]);
    std::printf("\n");
  }
  std::printf("per-column efficiency residual |sum_i psi_ij - u_j|:\n");
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += cols[j].psi[i];
    double resid = std::abs(sum - cols[j].u_j);
    worst = std::max(worst, resid);
    std::printf("%12.3g", resid);
  }
  std::printf("\nworst residual: %.3g\n", worst);

  if (!out_path.empty()) {
    JsonWriter w;
    w.begin_object();
    w.kv("n", n);
    w.key("psi");
    w.begin_array();
    for (int i = 0; i < n; ++i) {
      w.begin_array();
      for (int j = 0; j < n; ++j) w.value(cols[j].psi[i]);
      w.end_array();
    }
    w.end_array();
    w.key("receiver_utility");
    w.begin_array();
    for (int j = 0; j < n; ++j) w.value(cols[j].u_j);
    w.end_array();
    w.end_object();
    write_text_file(out_path, w.take());
    std::printf("share table written: %s\n", out_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairx: reciprocal and core-stable data exchanges via local search"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  int gen_n = 4;
  std::string gen_family = "coverage";
  double gen_eps = 0.05;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  ShareRuleFlags gen_share;
  gen->add_option("--n", gen_n, "agent count (>= 2)")->required();
  gen->add_option("--family", gen_family, "additive | concave_of_sum | coverage");
  gen->add_option("--epsilon", gen_eps, "approximation parameter in (0,1)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("-o,--out", gen_out, "output path (stdout when omitted)");
  add_share_flags(gen, gen_share);

  auto* solve = app.add_subcommand("solve", "run the local-search solver on an instance");
  std::string solve_instance, solve_out, solve_trace, solve_csv;
  double solve_eps = 0.0;
  std::uint64_t solve_seed = 0, solve_max_iters = 0;
  bool solve_allow_ncm = false, solve_verify = false;
  ShareRuleFlags solve_share;
  solve->add_option("instance", solve_instance, "instance JSON path")->required();
  solve->add_option("-o,--out", solve_out, "result JSON path");
  solve->add_option("--trace", solve_trace, "trace JSONL path (omit to skip)");
  solve->add_option("--csv", solve_csv, "sorted-surplus trajectory CSV path");
  solve->add_option("--epsilon", solve_eps, "override the instance epsilon");
  solve->add_option("--seed", solve_seed, "override the sampled-oracle seed");
  solve->add_option("--max-iters", solve_max_iters, "outer iteration cap (0 = 10 n^5 ceil(L/eps))");
  solve->add_flag("--allow-noncrossmonotone", solve_allow_ncm,
                  "run even when the share rule is not cross-monotone");
  solve->add_flag("--verify", solve_verify, "chain verification at 3*epsilon after solving");
  add_share_flags(solve, solve_share);

  auto* verify = app.add_subcommand("verify", "check reciprocity and core stability of an exchange");
  std::string ver_instance, ver_exchange, ver_out;
  double ver_eps = 0.0;
  verify->add_option("instance", ver_instance, "instance JSON path")->required();
  verify->add_option("--exchange", ver_exchange, "exchange or solver-result JSON path")->required();
  verify->add_option("--epsilon", ver_eps, "threshold for both checks (default 3*instance epsilon)");
  verify->add_option("-o,--out", ver_out, "report JSON path");

  auto* shap = app.add_subcommand("shapley", "print the share matrix for an exchange");
  std::string shp_instance, shp_exchange, shp_out;
  int shp_sampled = 0;
  std::uint64_t shp_seed = 0;
  shap->add_option("instance", shp_instance, "instance JSON path")->required();
  shap->add_option("--exchange", shp_exchange,
                   "exchange JSON path (all-ones off-diagonal when omitted)");
  shap->add_option("--sampled", shp_sampled, "use the sampled estimator with this many samples");
  shap->add_option("--seed", shp_seed, "sampled-estimator seed");
  shap->add_option("-o,--out", shp_out, "share table JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_out, gen_n, gen_family, gen_eps, gen_seed, gen_share);
    if (solve->parsed())
      return cmd_solve(solve_instance, solve_out, solve_trace, solve_csv, solve_eps, solve_seed,
                       solve_max_iters, solve_allow_ncm, solve_verify, solve_share);
    if (verify->parsed()) return cmd_verify_files(ver_instance, ver_exchange, ver_eps, ver_out);
    if (shap->parsed()) return cmd_shapley(shp_instance, shp_exchange, shp_sampled, shp_seed, shp_out);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitOk;
}
