#include <doctest.h>

#include <cmath>
#include <vector>

#include "fairx/errors.hpp"
#include "fairx/io.hpp"
#include "fairx/rng.hpp"
#include "fairx/utility.hpp"

using namespace fairx;

TEST_CASE("utility families: normalization and pinned values") {
  AdditiveUtility add{{1.0, 2.0}};
  ConcaveOfSumUtility cs{1.0, {1.0, 1.0}, 0.25};
  CoverageUtility cov{{1.0}, {{0.5}, {0.5}}};

  std::vector<double> zero{0.0, 0.0};
  CHECK(eval_utility(add, zero) == 0.0);
  CHECK(eval_utility(cs, zero) == 0.0);
  CHECK(eval_utility(cov, zero) == 0.0);

  std::vector<double> b{1.0, 0.5};
  CHECK(eval_utility(add, b) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> ones{1.0, 1.0};
  CHECK(eval_utility(cov, ones) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("perturbed utility adds exactly (eps/n) * total consumption") {
  AdditiveUtility add{{1.0, 2.0}};
  UtilitySpec spec = add;
  PerturbedUtility pu{&spec, 0.1, 2};
  std::vector<double> b{1.0, 0.5};
  CHECK(eval_perturbed_utility(pu, b) == doctest::Approx(2.075).epsilon(1e-12));
  CHECK(eval_perturbed_utility(pu, std::vector<double>{0.0, 0.0}) == 0.0);

  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x{rng.uniform01(), rng.uniform01()};
    double base = eval_utility(spec, x);
    double pert = eval_perturbed_utility(pu, x);
    CHECK(std::abs(pert - base - 0.05 * (x[0] + x[1])) <= 1e-12);
  }
}

TEST_CASE("perturbation forces strict non-satiation") {
  ConcaveOfSumUtility cs{1.0, {1.0, 1.0, 0.0}, 0.25};
  UtilitySpec spec = cs;
  PerturbedUtility pu{&spec, 0.1, 3};
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> b{rng.uniform(0, 0.9), rng.uniform(0, 0.9), rng.uniform(0, 0.9)};
    int k = static_cast<int>(rng.below(3));
    double h = rng.uniform(1e-4, 0.1);
    std::vector<double> b2 = b;
    b2[k] += h;
    CHECK(eval_perturbed_utility(pu, b2) - eval_perturbed_utility(pu, b) >=
          (0.1 / 3) * h - 1e-12);
  }
}

TEST_CASE("analytic lipschitz constants") {
  CHECK(analytic_lipschitz(AdditiveUtility{{1.0, 2.0}}) == 2.0);
  CHECK(analytic_lipschitz(ConcaveOfSumUtility{1.0, {1.0, 1.0}, 0.25}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(analytic_lipschitz(CoverageUtility{{1.0}, {{0.5}, {0.5}}}) ==
        doctest::Approx(0.5).epsilon(1e-12));

  UtilitySpec spec = AdditiveUtility{{1.0, 2.0}};
  PerturbedUtility pu{&spec, 0.1, 2};
  CHECK(analytic_lipschitz(pu) == doctest::Approx(2.05).epsilon(1e-12));
}

TEST_CASE("finite differences: monotone and within the declared constant") {
  Rng rng(42);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (const char* family : {"additive", "concave_of_sum", "coverage"}) {
      Instance inst = generate_instance(4, family, 0.1, seed);
      for (int trial = 0; trial < 60; ++trial) {
        int agent = static_cast<int>(rng.below(4));
        std::vector<double> b(4);
        for (auto& v : b) v = rng.uniform(0.0, 0.99);
        int k = static_cast<int>(rng.below(4));
        double h = 1e-3;
        std::vector<double> b2 = b;
        b2[k] += h;
        double lo = eval_utility(inst.utilities[agent], b);
        double hi = eval_utility(inst.utilities[agent], b2);
        CHECK(hi >= lo - 1e-12);                          // monotone
        CHECK(std::abs(hi - lo) <= inst.lipschitz * h + 1e-12);  // declared-L
      }
    }
  }
}

TEST_CASE("diminishing returns for the submodular families") {
  Rng rng(99);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const char* family : {"concave_of_sum", "coverage"}) {
      Instance inst = generate_instance(5, family, 0.1, seed);
      for (int trial = 0; trial < 120; ++trial) {
        int agent = static_cast<int>(rng.below(5));
        std::vector<double> a(5), b(5);
        for (int k = 0; k < 5; ++k) {
          a[k] = rng.uniform(0.0, 0.5);
          b[k] = a[k] + rng.uniform(0.0, 0.45);  // b >= a coordinatewise
        }
        int k = static_cast<int>(rng.below(5));
        double h = rng.uniform(1e-3, 1.0 - b[k]);
        std::vector<double> a2 = a, b2 = b;
        a2[k] += h;
        b2[k] += h;
        const UtilitySpec& u = inst.utilities[agent];
        double gain_low = eval_utility(u, a2) - eval_utility(u, a);
        double gain_high = eval_utility(u, b2) - eval_utility(u, b);
        CHECK(gain_low >= gain_high - 1e-9);
      }
    }
  }
}

TEST_CASE("malformed parameters are rejected") {
  CHECK_THROWS_AS(validate_utility(AdditiveUtility{{1.0, -0.5}}, 2), InputError);
  CHECK_THROWS_AS(validate_utility(ConcaveOfSumUtility{1.0, {1.0, 1.0}, 0.0}, 2), InputError);
  CHECK_THROWS_AS(validate_utility(ConcaveOfSumUtility{-1.0, {1.0, 1.0}, 0.25}, 2), InputError);
  CHECK_THROWS_AS(validate_utility(CoverageUtility{{1.0}, {{0.5}, {1.5}}}, 2), InputError);
  CHECK_THROWS_AS(validate_utility(CoverageUtility{{-1.0}, {{0.5}, {0.5}}}, 2), InputError);
  CHECK_NOTHROW(validate_utility(AdditiveUtility{{1.0, 0.5}}, 2));
}
