// Small numeric oracles for the test suite. Everything here is independent
// of the library under test.
#ifndef FID_TESTS_STAT_UTILS_HPP
#define FID_TESTS_STAT_UTILS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stat_utils {

// scaled complementary error function e^{x^2} erfc(x), stable for large x
inline double erfcx(double x) {
  if (x <= 5.0) return std::exp(x * x) * std::erfc(x);
  // Laplace continued fraction for sqrt(pi) e^{x^2} erfc(x)
  double cf = 0.0;
  for (int k = 40; k >= 1; --k) cf = (0.5 * k) / (x + cf);
  return 1.0 / ((x + cf) * std::sqrt(M_PI));
}

// regularized lower incomplete gamma P(a, x) by series expansion
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

// chi-square goodness-of-fit p-value for binned counts against expected
// counts (already pooled so that every expected bin is reasonably filled)
inline double chi_square_p(const std::vector<double>& observed,
                           const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_p: bad bins");
  double chi2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    chi2 += d * d / expected[i];
  }
  const double dof = static_cast<double>(observed.size() - 1);
  return gamma_q(0.5 * dof, 0.5 * chi2);
}

}  // namespace stat_utils

#endif  // FID_TESTS_STAT_UTILS_HPP
