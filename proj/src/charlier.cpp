#include "fid/charlier.hpp"

#include <cmath>
#include <limits>

namespace fid::charlier {

double poisson_mass(long x, double alpha) {
  if (x < 0) throw std::invalid_argument("poisson_mass: x must be >= 0");
  return std::exp(static_cast<double>(x) * std::log(alpha) - alpha -
                  std::lgamma(static_cast<double>(x) + 1.0));
}

long poisson_support_bound(double alpha, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("poisson_support_bound: tol must be > 0");
  long x = static_cast<long>(std::ceil(alpha)) + 1;
  for (;; ++x) {
    const double ratio = alpha / static_cast<double>(x + 2);
    if (ratio >= 1.0) continue;
    // tail beyond x is dominated by the geometric series starting at m(x+1)
    const double bound = poisson_mass(x + 1, alpha) / (1.0 - ratio);
    if (bound < tol) return x;
    if (x > 100000000L)
      throw std::runtime_error("poisson_support_bound: no convergence");
  }
}

std::optional<double> charlier_c_recurrence(long n, long x, double alpha) {
  if (n < 0 || x < 0) throw std::invalid_argument("charlier_c: n, x must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("charlier_c: alpha must be > 0");
  // alpha C_{k+1} = (k + alpha - x) C_k - k C_{k-1}
  double prev = 0.0;   // C_{-1}
  double cur = 1.0;    // C_0
  const double xd = static_cast<double>(x);
  for (long k = 0; k < n; ++k) {
    const double next = ((static_cast<double>(k) + alpha - xd) * cur -
                         static_cast<double>(k) * prev) / alpha;
    prev = cur;
    cur = next;
    if (!std::isfinite(cur)) return std::nullopt;
  }
  return cur;
}

std::optional<double> charlier_c(long n, long x, double alpha) {
  // keep the recursion short: C_n(x) = C_x(n) lets us recurse on min(n, x)
  if (x < n) return charlier_c_recurrence(x, n, alpha);
  return charlier_c_recurrence(n, x, alpha);
}

double log_norm_constant(long n, double alpha) {
  return 0.5 * (std::lgamma(static_cast<double>(n) + 1.0) -
                static_cast<double>(n) * std::log(alpha));
}

std::optional<double> charlier_q(long n, long x, double alpha) {
  const auto c = charlier_c(n, x, alpha);
  if (!c) return std::nullopt;
  if (*c == 0.0) return 0.0;
  const double logq = std::log(std::abs(*c)) - log_norm_constant(n, alpha);
  const double q = std::copysign(std::exp(logq), *c);
  if (!std::isfinite(q)) return std::nullopt;
  return q;
}

Eigen::VectorXd charlier_q_all(long n_max, long x, double alpha) {
  Eigen::VectorXd out(n_max + 1);
  for (long n = 0; n <= n_max; ++n) {
    const auto q = charlier_q(n, x, alpha);
    if (!q) throw std::overflow_error("charlier_q_all: value out of range");
    out[n] = *q;
  }
  return out;
}

long inner_product_support_bound(double alpha, long n_limit, double tol) {
  // |Q_n(x)| <= d_n^{-1} (1+n/alpha)^x and
  // m(x) (1+n/alpha)^x = e^n poisson_mass(x, alpha + n), so the inner
  // product tail for every mode n <= n_limit is certified once the
  // Poisson(alpha + n_limit) tail drops below tol e^{-n_limit}
  const double shifted_tol =
      std::max(tol * std::exp(-static_cast<double>(n_limit)), 1e-290);
  return poisson_support_bound(alpha + static_cast<double>(n_limit), shifted_tol);
}

SpectralCoefficients decompose(const std::function<double(long)>& g,
                               const ModelParams& params,
                               const TruncationPolicy& policy,
                               Growth growth) {
  const double alpha = params.alpha();
  const double support_tol = growth == Growth::bounded ? 1e-16 : 1e-20;
  const bool adaptive =
      policy.strategy == TruncationPolicy::Strategy::certified_tail;
  long n_limit = adaptive ? std::min(policy.n_max_cap, 64) : policy.n_max_cap;

  for (;;) {
    const long x_cap = inner_product_support_bound(alpha, n_limit, support_tol);

    Eigen::VectorXd mass(x_cap + 1), gv(x_cap + 1);
    double norm_sq = 0.0;
    double last_block = 0.0;
    for (long x = 0; x <= x_cap; ++x) {
      mass[x] = poisson_mass(x, alpha);
      gv[x] = mass[x] > 0.0 ? g(x) : 0.0;
      const double term = mass[x] * gv[x] * gv[x];
      norm_sq += term;
      if (x >= x_cap - 4) last_block += term;
    }
    // the weighted norm must have converged well inside the support cap
    if (!(std::isfinite(norm_sq)) ||
        (norm_sq > 0.0 && last_block > 1e-10 * norm_sq + policy.tol))
      throw std::runtime_error(
          "decompose: l^2(m) norm did not converge on the support cap");

    std::vector<double> coeffs;
    double sum_sq = 0.0;
    bool converged = !adaptive;
    for (long n = 0; n <= n_limit; ++n) {
      double gn = 0.0, comp = 0.0;
      for (long x = 0; x <= x_cap; ++x) {
        if (mass[x] == 0.0 || gv[x] == 0.0) continue;
        const auto q = charlier_q(n, x, alpha);
        if (!q) {
          // the raw recurrence overflowed; certified negligible iff
          // m(x)|Q_n(x)| <= e^{n + alpha/2} poisson_mass(x, alpha + n)
          const double nd = static_cast<double>(n);
          const double xd = static_cast<double>(x);
          const double log_bound = nd + 0.5 * alpha - (alpha + nd) +
                                   xd * std::log(alpha + nd) -
                                   std::lgamma(xd + 1.0);
          if (log_bound + std::log(std::abs(gv[x])) < std::log(1e-30)) continue;
          throw std::overflow_error("decompose: Charlier value out of range");
        }
        const double term = mass[x] * gv[x] * (*q);
        const double y = term - comp;
        const double s = gn + y;
        comp = (s - gn) - y;
        gn = s;
      }
      coeffs.push_back(gn);
      sum_sq += gn * gn;
      // the Parseval defect cannot be resolved below the rounding floor of
      // the norm accumulation itself
      const double floor_sq =
          64.0 * std::numeric_limits<double>::epsilon() * norm_sq;
      if (adaptive && n >= 2 &&
          norm_sq - sum_sq <= policy.tol * policy.tol + floor_sq) {
        converged = true;
        break;
      }
    }
    if (!converged && n_limit < policy.n_max_cap) {
      // needs more modes than the provisional support cap certifies
      n_limit = policy.n_max_cap;
      continue;
    }
    SpectralCoefficients result;
    result.coeffs = Eigen::Map<Eigen::VectorXd>(coeffs.data(), coeffs.size());
    result.norm_sq = norm_sq;
    result.norm_sq_tail = std::max(0.0, norm_sq - sum_sq);
    return result;
  }
}

double reconstruct(const SpectralCoefficients& coeffs, long x,
                   const ModelParams& params) {
  const double alpha = params.alpha();
  // descending-n accumulation with compensation; see spectral solvers
  double sum = 0.0, comp = 0.0;
  for (long n = coeffs.coeffs.size() - 1; n >= 0; --n) {
    const auto q = charlier_q(n, x, alpha);
    if (!q) throw std::overflow_error("reconstruct: Charlier value out of range");
    const double term = coeffs.coeffs[n] * (*q);
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

}  // namespace fid::charlier
