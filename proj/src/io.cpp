#include "fairx/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairx/errors.hpp"
#include "fairx/json_writer.hpp"
#include "fairx/rng.hpp"

namespace fairx {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* field, const char* ctx) {
  auto it = j.find(field);
  if (it == j.end())
    throw InputError(std::string(ctx) + ": missing field \"" + field + "\"");
  return *it;
}

std::vector<double> as_vector(const json& j, const char* ctx) {
  if (!j.is_array()) throw InputError(std::string(ctx) + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError(std::string(ctx) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

UtilitySpec parse_utility(const json& j, int agent) {
  const std::string ctx = "utilities[" + std::to_string(agent) + "]";
  std::string family = need(j, "family", ctx.c_str()).get<std::string>();
  if (family == "additive") {
    AdditiveUtility u;
    u.weights = as_vector(need(j, "weights", ctx.c_str()), ctx.c_str());
    return u;
  }
  if (family == "concave_of_sum") {
    ConcaveOfSumUtility u;
    u.scale = need(j, "scale", ctx.c_str()).get<double>();
    u.weights = as_vector(need(j, "weights", ctx.c_str()), ctx.c_str());
    u.smoothing = need(j, "smoothing", ctx.c_str()).get<double>();
    return u;
  }
  if (family == "coverage") {
    CoverageUtility u;
    u.topic_values = as_vector(need(j, "topic_values", ctx.c_str()), ctx.c_str());
    const json& rows = need(j, "hit_probabilities", ctx.c_str());
    if (!rows.is_array()) throw InputError(ctx + ": hit_probabilities must be an array of rows");
    for (const auto& row : rows) u.hit_probabilities.push_back(as_vector(row, ctx.c_str()));
    return u;
  }
  throw InputError(ctx + ": unknown family \"" + family + "\"");
}

void write_utility(JsonWriter& w, const UtilitySpec& spec) {
  w.begin_object();
  w.kv("family", family_name(spec));
  std::visit(
      [&](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, AdditiveUtility>) {
          w.kv("weights", u.weights);
        } else if constexpr (std::is_same_v<T, ConcaveOfSumUtility>) {
          w.kv("scale", u.scale);
          w.kv("weights", u.weights);
          w.kv("smoothing", u.smoothing);
        } else {
          w.kv("topic_values", u.topic_values);
          w.key("hit_probabilities");
          w.begin_array();
          for (const auto& row : u.hit_probabilities) w.value(row);
          w.end_array();
        }
      },
      spec);
  w.end_object();
}

ShareRule parse_share_rule(const json& j, int n) {
  ShareRule rule;
  std::string kind = need(j, "rule", "share_rule").get<std::string>();
  if (kind == "shapley_exact") {
    rule.kind = ShareRuleKind::shapley_exact;
  } else if (kind == "shapley_sampled") {
    rule.kind = ShareRuleKind::shapley_sampled;
    rule.samples = need(j, "samples", "share_rule").get<int>();
  } else if (kind == "proportional") {
    rule.kind = ShareRuleKind::proportional;
    if (j.contains("weights")) {
      const json& rows = j["weights"];
      for (const auto& row : rows) {
        auto v = as_vector(row, "share_rule.weights");
        rule.weights.insert(rule.weights.end(), v.begin(), v.end());
      }
      if (static_cast<int>(rule.weights.size()) != n * n)
        throw InputError("share_rule: proportional weights must be an n x n matrix");
    }
  } else {
    throw InputError("share_rule: unknown rule \"" + kind + "\"");
  }
  return rule;
}

void write_share_rule(JsonWriter& w, const ShareRule& rule, int n) {
  w.begin_object();
  switch (rule.kind) {
    case ShareRuleKind::shapley_exact: w.kv("rule", "shapley_exact"); break;
    case ShareRuleKind::shapley_sampled:
      w.kv("rule", "shapley_sampled");
      w.kv("samples", rule.samples);
      break;
    case ShareRuleKind::proportional:
      w.kv("rule", "proportional");
      if (!rule.weights.empty()) {
        w.key("weights");
        w.begin_array();
        for (int i = 0; i < n; ++i) {
          w.begin_array();
          for (int j = 0; j < n; ++j) w.value(rule.weights[static_cast<size_t>(i) * n + j]);
          w.end_array();
        }
        w.end_array();
      }
      break;
  }
  w.end_object();
}

void write_matrix(JsonWriter& w, const ExchangeMatrix& x) {
  w.begin_array();
  for (int i = 0; i < x.n(); ++i) {
    w.begin_array();
    for (int j = 0; j < x.n(); ++j) w.value(x(i, j));
    w.end_array();
  }
  w.end_array();
}

void write_constants(JsonWriter& w, const SolverConstants& c) {
  w.begin_object();
  w.kv("n", c.n);
  w.kv("epsilon", c.epsilon);
  w.kv("lipschitz", c.lipschitz);
  w.kv("eps_over_n", c.eps_over_n);
  w.kv("eps_over_n2", c.eps_over_n2);
  w.kv("eps_over_2n3", c.eps_over_2n3);
  w.kv("eps_over_4n3", c.eps_over_4n3);
  w.kv("graph_alpha", c.graph_alpha);
  w.kv("increase_step", c.increase_step);
  w.kv("tol_bs", c.tol_bs);
  w.kv("lex_slack", c.lex_slack);
  w.kv("lex_fp_slack", c.lex_fp_slack);
  w.kv("phase_iter_bound", c.phase_iter_bound);
  w.kv("max_outer_default", static_cast<unsigned long long>(c.max_outer_default));
  w.end_object();
}

}  // namespace

Instance parse_instance_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("instance: JSON parse error: ") + e.what());
  }
  if (j.contains("schema_version") && j["schema_version"].get<int>() != 1)
    throw InputError("instance: unsupported schema_version");

  Instance inst;
  inst.n = need(j, "n", "instance").get<int>();
  if (inst.n < 2) throw InputError("instance: n must be >= 2");
  inst.epsilon = need(j, "epsilon", "instance").get<double>();

  const json& utils = need(j, "utilities", "instance");
  if (!utils.is_array() || static_cast<int>(utils.size()) != inst.n)
    throw InputError("instance: utilities must be an array of n entries");
  for (int i = 0; i < inst.n; ++i) inst.utilities.push_back(parse_utility(utils[i], i));

  if (j.contains("share_rule")) inst.share_rule = parse_share_rule(j["share_rule"], inst.n);
  if (j.contains("seed")) inst.share_rule.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("lipschitz")) {
    inst.lipschitz = j["lipschitz"].get<double>();
  } else {
    double m = 1.0;
    for (const auto& u : inst.utilities) m = std::max(m, analytic_lipschitz(u));
    inst.lipschitz = m;
  }
  inst.validate();
  return inst;
}

Instance parse_instance_file(const std::string& path) {
  return parse_instance_text(read_text_file(path));
}

std::string instance_to_json(const Instance& inst) {
  JsonWriter w;
  w.begin_object();
  w.kv("schema_version", 1);
  w.kv("n", inst.n);
  w.kv("epsilon", inst.epsilon);
  w.kv("lipschitz", inst.lipschitz);
  w.kv("seed", static_cast<unsigned long long>(inst.share_rule.seed));
  w.key("share_rule");
  write_share_rule(w, inst.share_rule, inst.n);
  w.key("utilities");
  w.begin_array();
  for (const auto& u : inst.utilities) write_utility(w, u);
  w.end_array();
  w.end_object();
  return w.take();
}

Instance generate_instance(int n, const std::string& family, double eps, std::uint64_t seed) {
  if (n < 2) throw InputError("generate: n must be >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("generate: epsilon must be in (0,1)");
  Rng rng(mix_seed(seed, 0x66616972));  // stream tag

  Instance inst;
  inst.n = n;
  inst.epsilon = eps;
  inst.share_rule.kind = ShareRuleKind::shapley_exact;
  inst.share_rule.seed = seed;

  for (int i = 0; i < n; ++i) {
    if (family == "additive") {
      AdditiveUtility u;
      u.weights.assign(n, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) u.weights[j] = rng.uniform(0.5, 2.0);
      inst.utilities.push_back(u);
    } else if (family == "concave_of_sum") {
      ConcaveOfSumUtility u;
      u.scale = 1.0;
      u.smoothing = 0.25;
      u.weights.assign(n, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) u.weights[j] = rng.uniform(0.5, 2.0);
      inst.utilities.push_back(u);
    } else if (family == "coverage") {
      CoverageUtility u;
      const int topics = 2 * n;
      u.topic_values.resize(topics);
      for (int t = 0; t < topics; ++t) u.topic_values[t] = rng.uniform(0.0, 1.0);
      u.hit_probabilities.assign(n, std::vector<double>(topics, 0.0));
      for (int jj = 0; jj < n; ++jj) {
        if (jj == i) continue;
        for (int t = 0; t < topics; ++t) u.hit_probabilities[jj][t] = rng.uniform(0.0, 1.0);
      }
      inst.utilities.push_back(u);
    } else {
      throw InputError("generate: unknown family \"" + family + "\"");
    }
  }

  double m = 1.0;
  for (const auto& u : inst.utilities) m = std::max(m, analytic_lipschitz(u));
  inst.lipschitz = m;
  inst.validate();
  return inst;
}

ExchangeMatrix parse_exchange_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("exchange: JSON parse error: ") + e.what());
  }
  const json& rows = need(j, "exchange", "exchange");
  if (!rows.is_array()) throw InputError("exchange: \"exchange\" must be an array of rows");
  const int n = static_cast<int>(rows.size());
  ExchangeMatrix x(n);
  for (int i = 0; i < n; ++i) {
    auto row = as_vector(rows[i], "exchange");
    if (static_cast<int>(row.size()) != n) throw InputError("exchange: matrix is not square");
    for (int jj = 0; jj < n; ++jj) {
      double v = row[jj];
      if (i == jj) {
        if (v != 0.0) throw InputError("exchange: diagonal entry must be 0");
        continue;
      }
      if (!(v >= 0.0 && v <= 1.0))
        throw InputError("exchange: entry (" + std::to_string(i) + "," + std::to_string(jj) +
                         ") = " + std::to_string(v) + " outside [0,1]");
      x.set(i, jj, v);
    }
  }
  return x;
}

ExchangeMatrix parse_exchange_file(const std::string& path) {
  return parse_exchange_text(read_text_file(path));
}

std::string result_to_json(const SolverResult& res, const Instance& inst) {
  JsonWriter w;
  w.begin_object();
  w.kv("schema_version", 1);
  w.kv("status", res.status == SolverStatus::converged ? "converged" : "max_iters_exceeded");
  w.kv("n", inst.n);
  w.kv("epsilon", res.trace.constants.epsilon);
  w.kv("lipschitz", res.trace.constants.lipschitz);
  w.key("share_rule");
  write_share_rule(w, inst.share_rule, inst.n);
  w.kv("iterations", static_cast<unsigned long long>(res.outer_iterations));
  w.key("constants");
  write_constants(w, res.trace.constants);
  w.key("exchange");
  write_matrix(w, res.x_final);
  w.kv("surplus_perturbed", res.surplus_perturbed);
  w.kv("surplus_original", res.surplus_original);
  w.key("certified");
  w.begin_object();
  w.kv("reciprocal_3eps", res.certified_reciprocal_3eps);
  w.kv("graph_acyclic", res.certified_graph_acyclic);
  w.end_object();
  w.end_object();
  return w.take();
}

std::string trace_to_jsonl(const SolverTrace& trace) {
  std::string out;
  {
    JsonWriter w;
    w.begin_object();
    w.kv("type", "header");
    w.key("constants");
    write_constants(w, trace.constants);
    w.kv("initial_surplus", trace.initial_surplus);
    w.end_object();
    out += w.take();
    out += '\n';
  }
  for (const TraceStep& st : trace.steps) {
    JsonWriter w;
    w.begin_object();
    w.kv("type", "step");
    switch (st.kind) {
      case StepKind::select_s: w.kv("kind", "select_S"); break;
      case StepKind::decrease_flow: w.kv("kind", "decrease_flow"); break;
      case StepKind::increase_flow: w.kv("kind", "increase_flow"); break;
    }
    w.kv("outer", static_cast<unsigned long long>(st.outer_iter));
    if (st.kind == StepKind::select_s) {
      w.kv("set", st.selected_set);
      w.kv("case", st.step_case == StepCase::decrease_phase ? "decrease" : "increase");
      if (st.receiver >= 0) w.kv("receiver", st.receiver);
      if (st.step_case == StepCase::increase_edge) {
        w.kv("edge_from", st.from);
        w.kv("edge_to", st.to);
      }
    } else {
      w.kv("from", st.from);
      w.kv("to", st.to);
      w.kv("old", st.old_value);
      w.kv("new", st.new_value);
    }
    w.kv("surplus_before", st.surplus_before);
    w.kv("surplus_after", st.surplus_after);
    w.kv("acyclic", st.acyclic_attested);
    w.end_object();
    out += w.take();
    out += '\n';
  }
  return out;
}

std::string trajectory_to_csv(const std::vector<std::vector<double>>& rows) {
  std::string out = "step";
  if (!rows.empty())
    for (size_t k = 0; k < rows[0].size(); ++k) out += ",sorted_surplus_" + std::to_string(k);
  out += '\n';
  for (size_t r = 0; r < rows.size(); ++r) {
    out += std::to_string(r);
    for (double v : rows[r]) {
      out += ',';
      out += JsonWriter::number(v);
    }
    out += '\n';
  }
  return out;
}

std::string report_to_json(const VerificationReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("reciprocity");
  w.begin_object();
  w.kv("pass", report.reciprocity.pass);
  w.kv("max_abs_surplus", report.reciprocity.max_abs_surplus);
  w.kv("surplus", report.reciprocity.surplus);
  w.end_object();
  w.key("core");
  w.begin_object();
  w.kv("pass", report.core.pass);
  w.kv("requested_eps", report.core.requested_eps);
  w.kv("core_stable_at", report.core.core_stable_at);
  if (report.core.witness) {
    w.key("witness");
    w.begin_object();
    w.kv("coalition", report.core.witness->coalition);
    w.kv("gains", report.core.witness->gains);
    w.end_object();
  }
  w.end_object();
  w.key("axioms");
  w.begin_array();
  for (const auto& a : report.axiom_results) {
    w.begin_object();
    w.kv("axiom", a.axiom);
    w.kv("guaranteed", a.guaranteed);
    w.kv("pass", a.pass);
    w.kv("max_residual", a.max_residual);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << text;
}

}  // namespace fairx
