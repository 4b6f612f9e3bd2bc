#include "fairx/utility.hpp"

#include <algorithm>
#include <cmath>

#include "fairx/errors.hpp"

namespace fairx {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError("utility: " + msg);
}

}  // namespace

void validate_utility(const UtilitySpec& spec, int n) {
  std::visit(
      [n](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, AdditiveUtility>) {
          require(static_cast<int>(u.weights.size()) == n, "additive: weights size != n");
          for (double w : u.weights) require(w >= 0.0 && std::isfinite(w), "additive: negative weight");
        } else if constexpr (std::is_same_v<T, ConcaveOfSumUtility>) {
          require(u.scale > 0.0 && std::isfinite(u.scale), "concave_of_sum: scale must be > 0");
          require(u.smoothing > 0.0 && std::isfinite(u.smoothing), "concave_of_sum: smoothing must be > 0");
          require(static_cast<int>(u.weights.size()) == n, "concave_of_sum: weights size != n");
          for (double w : u.weights) require(w >= 0.0 && std::isfinite(w), "concave_of_sum: negative weight");
        } else {
          require(!u.topic_values.empty(), "coverage: no topics");
          for (double v : u.topic_values) require(v >= 0.0 && std::isfinite(v), "coverage: negative topic value");
          require(static_cast<int>(u.hit_probabilities.size()) == n, "coverage: hit_probabilities rows != n");
          for (const auto& row : u.hit_probabilities) {
            require(row.size() == u.topic_values.size(), "coverage: hit_probabilities row size != topic count");
            for (double p : row) require(p >= 0.0 && p <= 1.0, "coverage: probability outside [0,1]");
          }
        }
      },
      spec);
}

double eval_utility(const UtilitySpec& spec, std::span<const double> bundle) {
  return std::visit(
      [&](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, AdditiveUtility>) {
          double s = 0.0;
          for (size_t j = 0; j < u.weights.size(); ++j) s += u.weights[j] * bundle[j];
          return s;
        } else if constexpr (std::is_same_v<T, ConcaveOfSumUtility>) {
          double s = 0.0;
          for (size_t j = 0; j < u.weights.size(); ++j) s += u.weights[j] * bundle[j];
          return u.scale * (std::sqrt(s + u.smoothing) - std::sqrt(u.smoothing));
        } else {
          double total = 0.0;
          const size_t topics = u.topic_values.size();
          for (size_t t = 0; t < topics; ++t) {
            double miss = 1.0;
            for (size_t j = 0; j < u.hit_probabilities.size(); ++j)
              miss *= 1.0 - u.hit_probabilities[j][t] * bundle[j];
            total += u.topic_values[t] * (1.0 - miss);
          }
          return total;
        }
      },
      spec);
}

double analytic_lipschitz(const UtilitySpec& spec) {
  return std::visit(
      [](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, AdditiveUtility>) {
          double m = 0.0;
          for (double w : u.weights) m = std::max(m, w);
          return m;
        } else if constexpr (std::is_same_v<T, ConcaveOfSumUtility>) {
          double m = 0.0;
          for (double w : u.weights) m = std::max(m, w);
          return u.scale * m / (2.0 * std::sqrt(u.smoothing));
        } else {
          double m = 0.0;
          for (const auto& row : u.hit_probabilities) {
            double s = 0.0;
            for (size_t t = 0; t < row.size(); ++t) s += u.topic_values[t] * row[t];
            m = std::max(m, s);
          }
          return m;
        }
      },
      spec);
}

const char* family_name(const UtilitySpec& spec) {
  switch (spec.index()) {
    case 0: return "additive";
    case 1: return "concave_of_sum";
    default: return "coverage";
  }
}

double eval_perturbed_utility(const PerturbedUtility& pu, std::span<const double> bundle) {
  double s = 0.0;
  for (double b : bundle) s += b;
  return eval_utility(*pu.base, bundle) + (pu.eps / pu.n) * s;
}

double analytic_lipschitz(const PerturbedUtility& pu) {
  return analytic_lipschitz(*pu.base) + pu.eps / pu.n;
}

}  // namespace fairx
