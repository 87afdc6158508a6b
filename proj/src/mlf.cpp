#include "fid/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fid/quadrature.hpp"

namespace fid::mlf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

MlfEval mlf_series(double nu, double x) {
  // E_nu(-x) = sum_j (-x)^j / Gamma(1 + nu j), compensated
  const double logx = std::log(x);
  double sum = 0.0, comp = 0.0, abs_sum = 0.0, max_term = 1.0;
  double term = 1.0;
  int j = 0;
  for (;;) {
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    abs_sum += std::abs(term);
    max_term = std::max(max_term, std::abs(term));
    ++j;
    const double lt = j * logx - std::lgamma(1.0 + nu * j);
    term = (j % 2 == 0 ? 1.0 : -1.0) * std::exp(lt);
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && j > 4) break;
    if (j > 100000) break;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double err = std::abs(term) + eps * (abs_sum + max_term);
  return {sum, err, MlfMethod::power_series};
}

MlfEval mlf_integral(double nu, double x) {
  // Completely monotone spectral representation, with the r^{nu-1}
  // singularity removed by r = u^{1/nu}:
  //   E_nu(-x) = sin(nu pi)/(nu pi)
  //              * int_0^inf exp(-(u x)^{1/nu}) / (u^2 + 2 u cos(nu pi) + 1) du
  const double cth = std::cos(nu * kPi);
  const double inv_nu = 1.0 / nu;
  const double xi = std::pow(x, inv_nu);
  const auto f = [&](double u) {
    const double e = -std::pow(u, inv_nu) * xi;
    if (e < -745.0) return 0.0;
    return std::exp(e) / (u * u + 2.0 * u * cth + 1.0);
  };
  // the exponential cuts off at (ux)^{1/nu} ~ 46
  const double u_cut = std::pow(46.0, nu) / x;
  const double upper = std::max({2.0, 4.0 * u_cut, -cth + 1.0});
  std::vector<double> pts{0.0};
  for (double s = u_cut / 4096.0; s < upper; s *= 2.0)
    if (s > pts.back()) pts.push_back(s);
  if (cth < 0.0) {
    // denominator dip near u = -cos(nu pi) for nu > 1/2
    const double sth = std::sin(nu * kPi);
    for (double p : {-cth - sth, -cth, -cth + sth})
      if (p > 0.0 && p < upper) pts.push_back(p);
  }
  pts.push_back(upper);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const double prefac = std::sin(nu * kPi) / (nu * kPi);
  auto q = quad::integrate_segmented(f, pts, 1e-15, 8000);
  const double tail = std::exp(-46.0) / std::max(upper - 1.0, 1.0);
  const double value = prefac * q.value;
  const double err = prefac * (q.err_est + tail);
  return {std::clamp(value, 0.0, 1.0), err,
          MlfMethod::global_pade_or_integral};
}

}  // namespace

MlfEval mlf(double nu, double z) {
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("mlf: nu must be in (0,1]");
  if (z > 0.0)
    throw std::invalid_argument("mlf: only z <= 0 is supported");
  if (z == 0.0) return {1.0, 0.0, MlfMethod::power_series};
  if (nu == 1.0)
    return {std::exp(z), 4.0 * std::numeric_limits<double>::epsilon(),
            MlfMethod::power_series};
  const double x = -z;
  // the alternating series loses eps * e^{x^{1/nu}}; keep that below ~1e-13
  if (std::pow(x, 1.0 / nu) <= 6.0) return mlf_series(nu, x);
  return mlf_integral(nu, x);
}

double mlf_relaxation(double nu, double b, long n, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("mlf_relaxation: t must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("mlf_relaxation: b must be > 0");
  if (n < 0) throw std::invalid_argument("mlf_relaxation: n must be >= 0");
  if (n == 0) return 1.0;
  return mlf(nu, -b * static_cast<double>(n) * std::pow(t, nu)).value;
}

double mlf_uniform_bound(double nu, double t0) {
  if (!(t0 > 0.0)) throw std::invalid_argument("mlf_uniform_bound: t0 must be > 0");
  return std::tgamma(1.0 + nu) / std::pow(t0, nu);
}

}  // namespace fid::mlf
