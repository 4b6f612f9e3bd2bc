#include <doctest.h>

#include <cmath>
#include <vector>

#include "fairx/errors.hpp"
#include "fairx/io.hpp"
#include "fairx/rng.hpp"
#include "fairx/surplus.hpp"

#include "oracles.hpp"

using namespace fairx;

namespace {

// Two agents, u_0 = 1 * x_10 and u_1 = 2 * x_01; the workhorse example.
Instance two_agent_additive() {
  Instance inst;
  inst.n = 2;
  inst.utilities.push_back(AdditiveUtility{{0.0, 1.0}});
  inst.utilities.push_back(AdditiveUtility{{2.0, 0.0}});
  inst.epsilon = 0.1;
  inst.lipschitz = 2.0;
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("bundle is the matrix column with a zero diagonal") {
  ExchangeMatrix zero(3);
  CHECK(zero.bundle(0) == std::vector<double>{0.0, 0.0, 0.0});

  ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(3);
  CHECK(ones.bundle(1) == std::vector<double>{1.0, 0.0, 1.0});

  ExchangeMatrix x(3);
  x.set(0, 1, 0.3);
  x.set(2, 1, 0.7);
  CHECK(x.bundle(1) == std::vector<double>{0.3, 0.0, 0.7});

  CHECK_THROWS_AS(x.bundle(3), InputError);
  CHECK_THROWS_AS(x.set(0, 1, 1.2), InputError);
  CHECK_THROWS_AS(x.set(1, 1, 0.5), InputError);
}

TEST_CASE("surplus on the two-agent additive example") {
  Instance inst = two_agent_additive();
  ShareEvaluator eval(inst, ShareOracle::plain(inst));

  ExchangeMatrix zero(2);
  SurplusProfile p0 = compute_surplus(eval, zero);
  CHECK(p0.delta == std::vector<double>{0.0, 0.0});

  ExchangeMatrix full = ExchangeMatrix::ones_off_diagonal(2);
  SurplusProfile p1 = compute_surplus(eval, full);
  CHECK(p1.delta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p1.delta[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(p1.sorted_view == std::vector<int>{0, 1});

  ExchangeMatrix half = full;
  half.set(0, 1, 0.5);
  SurplusProfile p2 = compute_surplus(eval, half);
  CHECK(p2.delta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p2.delta[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("incremental column recompute agrees with the full path") {
  Instance inst = two_agent_additive();
  ShareEvaluator eval(inst, ShareOracle::plain(inst));
  ExchangeMatrix x = ExchangeMatrix::ones_off_diagonal(2);
  SurplusProfile p = compute_surplus(eval, x);

  SUBCASE("no change is the identity") {
    SurplusProfile q = recompute_surplus_after_column_change(p, eval, x, 1);
    CHECK(q.delta == p.delta);
  }

  SUBCASE("two-agent hand value") {
    x.set(0, 1, 0.5);
    SurplusProfile q = recompute_surplus_after_column_change(p, eval, x, 1, true);
    CHECK(q.delta[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.delta[1] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("incremental recompute equals full recompute on coverage instances") {
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Instance inst = generate_instance(3, "coverage", 0.1, seed);
    ShareEvaluator eval(inst, ShareOracle::plain(inst));
    ExchangeMatrix x(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) x.set(i, j, rng.uniform01());
    SurplusProfile p = compute_surplus(eval, x);
    int j = static_cast<int>(rng.below(3));
    int i = (j + 1 + static_cast<int>(rng.below(2))) % 3;
    x.set(i, j, rng.uniform01());
    SurplusProfile inc = recompute_surplus_after_column_change(p, eval, x, j);
    SurplusProfile full = compute_surplus(eval, x);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(inc.delta[k] - full.delta[k]) <= 1e-9);
  }
}

TEST_CASE("incremental recompute detects an out-of-column edit") {
  Instance inst = generate_instance(3, "coverage", 0.1, 41);
  ShareEvaluator eval(inst, ShareOracle::plain(inst));
  ExchangeMatrix x = ExchangeMatrix::ones_off_diagonal(3);
  SurplusProfile p = compute_surplus(eval, x);
  x.set(0, 1, 0.2);  // column 1
  x.set(0, 2, 0.2);  // column 2 as well: precondition broken for j=1
  CHECK_THROWS_AS(recompute_surplus_after_column_change(p, eval, x, 1, true), InvariantError);
}

TEST_CASE("zero-sum of surpluses under exact shapley") {
  Rng rng(17);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const char* family : {"additive", "concave_of_sum", "coverage"}) {
      Instance inst = generate_instance(4, family, 0.05, seed);
      for (bool perturbed : {false, true}) {
        ShareOracle oracle = perturbed ? ShareOracle::perturbed_of(inst) : ShareOracle::plain(inst);
        ShareEvaluator eval(inst, oracle);
        ExchangeMatrix x(4);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            if (i != j) x.set(i, j, rng.uniform01());
        SurplusProfile p = compute_surplus(eval, x);
        double sum = 0.0;
        for (double d : p.delta) sum += d;
        CHECK(std::abs(sum) <= 1e-9);
      }
    }
  }
}

TEST_CASE("surplus matches the naive oracle") {
  Rng rng(23);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (const char* family : {"concave_of_sum", "coverage"}) {
      Instance inst = generate_instance(4, family, 0.1, seed);
      ExchangeMatrix x(4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (i != j) x.set(i, j, rng.uniform01());
      for (bool perturbed : {false, true}) {
        ShareOracle oracle = perturbed ? ShareOracle::perturbed_of(inst) : ShareOracle::plain(inst);
        ShareEvaluator eval(inst, oracle);
        SurplusProfile p = compute_surplus(eval, x);
        std::vector<double> ref = oracles::naive_surplus(inst, x, perturbed);
        for (int k = 0; k < 4; ++k) CHECK(p.delta[k] == doctest::Approx(ref[k]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sorted view is a descending permutation") {
  Instance inst = generate_instance(5, "coverage", 0.1, 9);
  ShareEvaluator eval(inst, ShareOracle::plain(inst));
  ExchangeMatrix x = ExchangeMatrix::ones_off_diagonal(5);
  SurplusProfile p = compute_surplus(eval, x);
  std::vector<bool> seen(5, false);
  for (int v : p.sorted_view) {
    CHECK(!seen[v]);
    seen[v] = true;
  }
  std::vector<double> s = p.sorted_deltas();
  for (size_t k = 1; k < s.size(); ++k) CHECK(s[k - 1] >= s[k]);
}

TEST_CASE("instance validation") {
  Instance inst = two_agent_additive();
  inst.lipschitz = 1.0;  // analytic constant of agent 1 is 2
  CHECK_THROWS_AS(inst.validate(), InputError);

  Instance bad_eps = two_agent_additive();
  bad_eps.epsilon = 0.0;
  CHECK_THROWS_AS(bad_eps.validate(), InputError);

  Instance bad_n = two_agent_additive();
  bad_n.n = 1;
  CHECK_THROWS_AS(bad_n.validate(), InputError);
}
