#ifndef FID_MODEL_HPP
#define FID_MODEL_HPP

#include <stdexcept>

namespace fid {

/// Immigration-death model parameters: constant immigration rate `a`,
/// per-capita death rate `b`, fractional order `nu` of the time derivative.
/// The Poisson parameter alpha = a/b is always derived, never stored.
struct ModelParams {
  double a;
  double b;
  double nu;

  ModelParams(double a_, double b_, double nu_) : a(a_), b(b_), nu(nu_) {
    if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
    if (!(b > 0.0)) throw std::invalid_argument("ModelParams: b must be > 0");
    if (!(nu > 0.0 && nu <= 1.0))
      throw std::invalid_argument("ModelParams: nu must be in (0,1]");
  }

  double alpha() const { return a / b; }
};

/// Declared growth class of a lattice datum, used to size support caps.
enum class Growth { bounded, polynomial };

/// Series truncation rule: `certified_tail` derives the cutoff from an
/// analytic tail bound; `fixed_n` always sums n_max_cap modes and reports
/// an uncertified error estimate.
struct TruncationPolicy {
  double tol = 1e-10;
  int n_max_cap = 400;
  enum class Strategy { fixed_n, certified_tail };
  Strategy strategy = Strategy::certified_tail;
};

}  // namespace fid

#endif  // FID_MODEL_HPP
