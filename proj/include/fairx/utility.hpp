#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fairx {

// u(b) = sum_j w_j * b_j
struct AdditiveUtility {
  std::vector<double> weights;
};

// u(b) = scale * (sqrt(sum_j w_j*b_j + smoothing) - sqrt(smoothing))
struct ConcaveOfSumUtility {
  double scale = 1.0;
  std::vector<double> weights;
  double smoothing = 0.25;
};

// u(b) = sum_t v_t * (1 - prod_j (1 - p_jt * b_j))
struct CoverageUtility {
  std::vector<double> topic_values;                  // v_t
  std::vector<std::vector<double>> hit_probabilities;  // [donor j][topic t]
};

using UtilitySpec = std::variant<AdditiveUtility, ConcaveOfSumUtility, CoverageUtility>;

// Throws InputError on malformed parameters (negative weight, smoothing <= 0,
// probability outside [0,1], size mismatch against n).
void validate_utility(const UtilitySpec& spec, int n);

double eval_utility(const UtilitySpec& spec, std::span<const double> bundle);

// Closed-form per-coordinate Lipschitz constant of the family.
double analytic_lipschitz(const UtilitySpec& spec);

const char* family_name(const UtilitySpec& spec);

// u~(b) = u(b) + (eps/n) * sum_k b_k. Forces strict non-satiation.
struct PerturbedUtility {
  const UtilitySpec* base = nullptr;
  double eps = 0.0;
  int n = 0;
};

double eval_perturbed_utility(const PerturbedUtility& pu, std::span<const double> bundle);

// The perturbation term adds eps/n to every partial derivative.
double analytic_lipschitz(const PerturbedUtility& pu);

}  // namespace fairx
