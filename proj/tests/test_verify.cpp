#include <doctest.h>

#include <cmath>
#include <vector>

#include "fairx/errors.hpp"
#include "fairx/io.hpp"
#include "fairx/rng.hpp"
#include "fairx/solver.hpp"
#include "fairx/verify.hpp"

using namespace fairx;

namespace {

Instance two_agent(double eps) {
  Instance inst;
  inst.n = 2;
  inst.utilities.push_back(AdditiveUtility{{0.0, 1.0}});
  inst.utilities.push_back(AdditiveUtility{{2.0, 0.0}});
  inst.epsilon = eps;
  inst.lipschitz = 2.0;
  return inst;
}

}  // namespace

TEST_CASE("reciprocity checking") {
  Instance inst = two_agent(0.1);

  ExchangeMatrix zero(2);
  ReciprocityCheck z = check_reciprocity(inst, zero, 0.0);
  CHECK(z.pass);
  CHECK(z.max_abs_surplus == 0.0);

  ExchangeMatrix balanced = ExchangeMatrix::ones_off_diagonal(2);
  balanced.set(0, 1, 0.5);
  ReciprocityCheck b = check_reciprocity(inst, balanced, 0.0);
  CHECK(b.pass);
  CHECK(b.max_abs_surplus <= 1e-12);

  ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(2);
  ReciprocityCheck o = check_reciprocity(inst, ones, 0.5);
  CHECK_FALSE(o.pass);
  CHECK(o.max_abs_surplus == doctest::Approx(1.0));
}

TEST_CASE("brute-force core stability") {
  SUBCASE("full sharing is core stable at every eps") {
    Instance inst = generate_instance(4, "coverage", 0.1, 5);
    ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(4);
    CoreStabilityCheck c = check_core_stability_bruteforce(inst, ones, 0.0);
    CHECK(c.pass);
    CHECK(c.core_stable_at == 0.0);
  }

  SUBCASE("empty exchange is blocked by the grand coalition") {
    Instance inst = two_agent(0.1);
    ExchangeMatrix zero(2);
    CoreStabilityCheck c = check_core_stability_bruteforce(inst, zero, 0.1);
    CHECK_FALSE(c.pass);
    REQUIRE(c.witness.has_value());
    CHECK(c.witness->coalition == std::vector<int>{0, 1});
    CHECK(c.witness->gains[0] == doctest::Approx(1.0));
    CHECK(c.witness->gains[1] == doctest::Approx(2.0));
    CHECK(c.core_stable_at == doctest::Approx(1.0));  // min gain of {0,1}
  }

  SUBCASE("witness enumeration prefers small coalitions") {
    // agents 0,1 block as a pair; {0,1,2} also blocks; the pair surfaces
    Instance inst;
    inst.n = 3;
    inst.utilities.push_back(AdditiveUtility{{0.0, 1.0, 0.1}});
    inst.utilities.push_back(AdditiveUtility{{1.0, 0.0, 0.1}});
    inst.utilities.push_back(AdditiveUtility{{1.0, 1.0, 0.0}});
    inst.epsilon = 0.1;
    inst.lipschitz = 1.0;
    ExchangeMatrix zero(3);
    CoreStabilityCheck c = check_core_stability_bruteforce(inst, zero, 0.5);
    CHECK_FALSE(c.pass);
    REQUIRE(c.witness.has_value());
    CHECK(c.witness->coalition == std::vector<int>{0, 1});
  }

  SUBCASE("cap is enforced") {
    Instance inst = two_agent(0.1);
    inst.n = 21;
    ExchangeMatrix big(21);
    CHECK_THROWS_AS(check_core_stability_bruteforce(inst, big, 0.1), InputError);
  }
}

TEST_CASE("acyclic exchange graph implies core stability (random cross-check)") {
  Rng rng(2718);
  int done = 0;
  for (std::uint64_t seed = 1; done < 60; ++seed) {
    for (const char* family : {"concave_of_sum", "coverage"}) {
      int n = 3 + static_cast<int>(seed % 5);
      Instance inst = generate_instance(n, family, 0.1, seed);
      double alpha = inst.epsilon / (n * inst.lipschitz);

      // random matrix forced acyclic: edges against a random order are killed
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      rng.shuffle(order);
      std::vector<int> pos(n);
      for (int i = 0; i < n; ++i) pos[order[i]] = i;
      ExchangeMatrix x(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          if (pos[i] > pos[j]) x.set(i, j, rng.uniform(1.0 - alpha, 1.0));
          else x.set(i, j, rng.uniform01());
        }
      REQUIRE(is_acyclic(build_exchange_graph(x, alpha)));
      CHECK(check_core_stability_bruteforce(inst, x, inst.epsilon).pass);
      ++done;
    }
  }
}

TEST_CASE("share axiom audit") {
  SUBCASE("exact shapley on shipped families passes everything") {
    Instance inst = generate_instance(4, "coverage", 0.1, 9);
    auto results = audit_share_axioms(inst, ShareOracle::plain(inst), 40);
    for (const auto& r : results) {
      CHECK(r.pass);
      CHECK(r.guaranteed);
      CHECK(r.max_residual <= 1e-9);
    }
  }

  SUBCASE("a 1.01-scaled oracle fails efficiency by about a percent of u_j") {
    Instance inst = generate_instance(3, "concave_of_sum", 0.1, 4);
    ShareEvaluator eval(inst, ShareOracle::plain(inst));
    ColumnShareFn broken = [&eval](const ExchangeMatrix& x, int j) {
      ColumnShares col = eval.column(x, j);
      for (double& p : col.psi) p *= 1.01;
      return col;
    };
    auto results = audit_share_axioms_fn(3, broken, true, 40);
    CHECK_FALSE(results[0].pass);  // efficiency
    CHECK(results[0].max_residual > 1e-4);
  }

  SUBCASE("proportional + coverage: cross-monotonicity flagged informational") {
    // donor 0 is weak (p = 0.1), donor 1 strong; raising x_1 lifts u_2 faster
    // than it dilutes donor 0's fraction, so psi_02 rises
    Instance inst;
    inst.n = 3;
    inst.utilities.push_back(AdditiveUtility{{0.0, 1.0, 1.0}});
    inst.utilities.push_back(AdditiveUtility{{1.0, 0.0, 1.0}});
    CoverageUtility cov;
    cov.topic_values = {1.0};
    cov.hit_probabilities = {{0.1}, {1.0}, {0.0}};
    inst.utilities.push_back(cov);
    inst.epsilon = 0.1;
    inst.lipschitz = 1.0;
    inst.share_rule.kind = ShareRuleKind::proportional;
    inst.validate();

    ShareEvaluator eval(inst, ShareOracle::plain(inst));
    ExchangeMatrix x(3);
    x.set(0, 2, 1.0);
    x.set(1, 2, 0.5);
    double before = eval.column(x, 2).psi[0];
    x.set(1, 2, 0.5 + 1e-3);
    double after = eval.column(x, 2).psi[0];
    CHECK(after > before + 1e-9);  // the violating pair exists

    auto results = audit_share_axioms(inst, ShareOracle::plain(inst), 40);
    CHECK_FALSE(results[3].guaranteed);
  }
}

TEST_CASE("trace validation") {
  SUBCASE("converged runs validate end to end") {
    Instance inst = two_agent(0.05);
    SolverResult res = run_local_search(inst);
    TraceCheck t = validate_trace(res.trace, inst);
    INFO(t.reason);
    CHECK(t.pass);

    Instance cov = generate_instance(4, "coverage", 0.1, 31);
    SolverResult res2 = run_local_search(cov);
    TraceCheck t2 = validate_trace(res2.trace, cov);
    INFO(t2.reason);
    CHECK(t2.pass);
  }

  SUBCASE("a corrupted surplus snapshot is caught at its step") {
    Instance inst = two_agent(0.05);
    SolverResult res = run_local_search(inst);
    REQUIRE(res.trace.steps.size() > 4);
    SolverTrace bad = res.trace;
    bad.steps[3].surplus_after[0] += 1e-3;
    TraceCheck t = validate_trace(bad, inst);
    CHECK_FALSE(t.pass);
    CHECK(t.first_violation_step >= 3);
    CHECK(t.first_violation_step <= 4);
  }

  SUBCASE("an empty trace on an already-reciprocal instance passes") {
    Instance inst;
    inst.n = 3;
    for (int i = 0; i < 3; ++i) {
      AdditiveUtility u{{1.0, 1.0, 1.0}};
      u.weights[i] = 0.0;
      inst.utilities.push_back(u);
    }
    inst.epsilon = 0.05;
    inst.lipschitz = 1.0;
    SolverResult res = run_local_search(inst);
    CHECK(res.trace.steps.empty());
    CHECK(validate_trace(res.trace, inst).pass);
  }
}

TEST_CASE("coalition checks are worker-count independent") {
  Instance inst = generate_instance(7, "coverage", 0.1, 77);
  ExchangeMatrix x(7);
  Rng rng(5);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (i != j) x.set(i, j, rng.uniform01());

  setenv("FAIRX_THREADS", "1", 1);
  CoreStabilityCheck serial = check_core_stability_bruteforce(inst, x, 0.05);
  setenv("FAIRX_THREADS", "2", 1);
  CoreStabilityCheck parallel = check_core_stability_bruteforce(inst, x, 0.05);
  unsetenv("FAIRX_THREADS");

  CHECK(serial.pass == parallel.pass);
  CHECK(serial.core_stable_at == parallel.core_stable_at);  // bitwise
  CHECK(serial.witness.has_value() == parallel.witness.has_value());
  if (serial.witness && parallel.witness)
    CHECK(serial.witness->coalition == parallel.witness->coalition);
}

TEST_CASE("verifier agrees with solver certificates") {
  for (std::uint64_t seed : {11ull, 12ull}) {
    Instance inst = generate_instance(4, "concave_of_sum", 0.1, seed);
    SolverResult res = run_local_search(inst);
    REQUIRE(res.status == SolverStatus::converged);
    double bound = 3 * inst.epsilon;
    ReciprocityCheck r = check_reciprocity(inst, res.x_final, bound);
    CHECK(r.pass == res.certified_reciprocal_3eps);
    CHECK(check_core_stability_bruteforce(inst, res.x_final, bound).pass);
  }
}
