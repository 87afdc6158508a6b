#ifndef FID_CHARLIER_HPP
#define FID_CHARLIER_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "fid/model.hpp"

namespace fid::charlier {

/// Poisson(alpha) mass m(x) = e^{-alpha} alpha^x / x!, evaluated in log
/// space so large x never overflows a factorial.
double poisson_mass(long x, double alpha);

/// Smallest X such that the Poisson(alpha) tail mass beyond X is < tol,
/// certified by the geometric bound m(X+1)/(1 - alpha/(X+2)).
long poisson_support_bound(double alpha, double tol);

/// Smallest X such that, for every mode n <= n_limit, the weighted sum
/// sum_{x > X} m(x) |Q_n(x)| h(x) is < tol e^{alpha/2} for |h| <= 1. Uses
/// m(x) (1+n/alpha)^x = e^n poisson_mass(x, alpha+n) and 1/d_n <= e^{alpha/2}.
long inner_product_support_bound(double alpha, long n_limit, double tol);

/// Poisson spectral measure with lazy mass evaluation.
struct SpectralMeasure {
  double alpha;

  explicit SpectralMeasure(double alpha_) : alpha(alpha_) {
    if (!(alpha > 0.0)) throw std::invalid_argument("SpectralMeasure: alpha must be > 0");
  }
  double mass(long x) const { return poisson_mass(x, alpha); }
  long support_bound(double tol) const { return poisson_support_bound(alpha, tol); }
};

/// Charlier polynomial C_n(x, alpha) by the raw three-term recurrence in
/// the degree, with no duality shortcut. Exposed so the self-duality
/// identity can be checked non-trivially.
std::optional<double> charlier_c_recurrence(long n, long x, double alpha);

/// C_n(x, alpha); recurses on min(n, x) via self-duality so the recursion
/// stays short. Returns nullopt instead of a non-finite value on overflow.
std::optional<double> charlier_c(long n, long x, double alpha);

/// Orthonormal Charlier polynomial Q_n(x) = C_n(x, alpha) / d_n with
/// d_n = sqrt(n!/alpha^n). The norm constant is applied in log space.
std::optional<double> charlier_q(long n, long x, double alpha);

/// Q_0(x)..Q_N(x) at a fixed lattice point. Throws on overflow.
Eigen::VectorXd charlier_q_all(long n_max, long x, double alpha);

/// log d_n = (1/2)(log n! - n log alpha).
double log_norm_constant(long n, double alpha);

/// Coefficients of an l^2(m) expansion over the orthonormal system,
/// together with a bound on the squared-norm mass beyond the last
/// computed mode (Parseval defect).
struct SpectralCoefficients {
  Eigen::VectorXd coeffs;    // g_0 .. g_N
  double norm_sq_tail = 0;   // >= ||g||^2 - sum g_n^2, clamped at 0
  double norm_sq = 0;        // numerically evaluated ||g||^2_{l^2(m)}
};

/// Projects g onto the orthonormal Charlier system: g_n = <g, Q_n>_{l^2(m)}.
/// The x-sums are truncated where the Poisson tail mass drops below the
/// policy-derived cap; a datum whose weighted norm has not converged there
/// is rejected as divergent.
SpectralCoefficients decompose(const std::function<double(long)>& g,
                               const ModelParams& params,
                               const TruncationPolicy& policy,
                               Growth growth = Growth::polynomial);

/// Evaluates sum_n coeffs[n] Q_n(x).
double reconstruct(const SpectralCoefficients& coeffs, long x,
                   const ModelParams& params);

}  // namespace fid::charlier

#endif  // FID_CHARLIER_HPP
