#include "fairx/constants.hpp"

#include <algorithm>

#include "fairx/errors.hpp"
#include "fairx/rational.hpp"

namespace fairx {

SolverConstants SolverConstants::derive(int n, double epsilon, double lipschitz) {
  if (n < 2) throw InputError("constants: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("constants: epsilon must be in (0,1)");
  if (!(lipschitz >= 1.0)) throw InputError("constants: L must be >= 1");

  const Rational eps = Rational::from_double(epsilon);
  const Rational L = Rational::from_double(lipschitz);
  const Rational rn = Rational::from_int(n);
  const Rational n2 = rn * rn;
  const Rational n3 = n2 * rn;
  const Rational n4 = n3 * rn;

  SolverConstants c;
  c.n = n;
  c.epsilon = epsilon;
  c.lipschitz = lipschitz;
  c.eps_over_n = (eps / rn).to_double();
  c.eps_over_n2 = (eps / n2).to_double();
  c.eps_over_2n3 = (eps / (Rational::from_int(2) * n3)).to_double();
  c.eps_over_4n3 = (eps / (Rational::from_int(4) * n3)).to_double();
  c.graph_alpha = (eps / (rn * L)).to_double();
  c.increase_step = (eps / (n3 * L)).to_double();
  c.tol_bs = (eps / (Rational::from_int(64) * n4 * L)).to_double();
  c.lex_slack = (eps / (Rational::from_int(64) * n3)).to_double();
  c.phase_iter_bound = (Rational::from_int(4) * n4 * L / eps + rn).to_double();
  // Strict lexicographic progress must see the guaranteed per-iteration drop
  // (at least eps^2/(n^5*L) at some sorted position) while absorbing the
  // accumulated float error of incremental surplus updates.
  c.lex_fp_slack = std::min(1e-11 * std::max(1.0, lipschitz),
                            0.25 * (epsilon * epsilon) /
                                (double(n) * n * n * n * n * lipschitz));

  const Rational outer = Rational::from_int(10) * n4 * rn * (L / eps).ceil_div_as_int();
  double outer_d = outer.to_double();
  c.max_outer_default = outer_d > 1e18 ? std::uint64_t(1) << 62 : static_cast<std::uint64_t>(outer_d);
  return c;
}

}  // namespace fairx
