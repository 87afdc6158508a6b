#include "fid/spectral.hpp"

#include <cmath>
#include <vector>

#include "fid/mlf.hpp"
#include "fid/operators.hpp"
#include "fid/quadrature.hpp"

namespace fid::spectral {

namespace {

// E_nu(-b n t^nu) <= min(1, Gamma(1+nu)/(b n t^nu))  (Lemma-style bound)
double relaxation_bound(long n, double t, const ModelParams& params) {
  if (n == 0) return 1.0;
  const double k = std::tgamma(1.0 + params.nu) / std::pow(t, params.nu);
  return std::min(1.0, k / (params.b * static_cast<double>(n)));
}

// |Q_n(x) Q_n(y)| <= (alpha^n/n!) (1+n/alpha)^{x+y}, from
// |C_x(n,alpha)| <= (1+n/alpha)^x. Geometric beyond n_geo with ratio 1/2.
double log_mode_bound(long n, long x, long y, double alpha) {
  const double nd = static_cast<double>(n);
  return nd * std::log(alpha) - std::lgamma(nd + 1.0) +
         static_cast<double>(x + y) * std::log1p(nd / alpha);
}

long geometric_onset(long x, long y, double alpha) {
  return std::max<long>(static_cast<long>(std::ceil(3.3 * alpha)) + 1,
                        2 * (x + y) + 2);
}

// certified bound on sum_{n > N} E_n |Q_n(x) Q_n(y)|, requires N >= onset
double series_tail_bound(long N, long x, long y, double t,
                         const ModelParams& params) {
  const double alpha = params.alpha();
  const double lead =
      relaxation_bound(N + 1, t, params) *
      std::exp(log_mode_bound(N + 1, x, y, alpha));
  return 2.0 * lead;  // ratio <= 1/2 beyond the onset
}

double kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double s = sum + y;
  comp = (s - sum) - y;
  sum = s;
  return sum;
}

}  // namespace

SeriesValue fundamental_solution(double t, long x, long y,
                                 const ModelParams& params,
                                 const TruncationPolicy& policy) {
  if (!(t >= 0.0)) throw std::invalid_argument("fundamental_solution: t must be >= 0");
  if (x < 0 || y < 0)
    throw std::invalid_argument("fundamental_solution: states must be >= 0");
  if (t == 0.0) return {x == y ? 1.0 : 0.0, 0.0, true};

  const double alpha = params.alpha();
  const double mx = charlier::poisson_mass(x, alpha);

  long N = -1;
  bool certified = false;
  double tail = 0.0;
  if (policy.strategy == TruncationPolicy::Strategy::certified_tail) {
    for (long n = geometric_onset(x, y, alpha); n <= policy.n_max_cap; ++n) {
      tail = mx * series_tail_bound(n, x, y, t, params);
      if (tail <= policy.tol) {
        N = n;
        certified = true;
        break;
      }
    }
    if (N < 0)
      throw std::runtime_error(
          "fundamental_solution: tolerance unreachable within n_max_cap");
  } else {
    N = policy.n_max_cap;
  }

  const Eigen::VectorXd qx = charlier::charlier_q_all(N, x, alpha);
  const Eigen::VectorXd qy =
      (x == y) ? qx : charlier::charlier_q_all(N, y, alpha);

  // ascending relaxation magnitude: sum from the weakest mode down to n = 0
  double sum = 0.0, comp = 0.0, mlf_err = 0.0;
  for (long n = N; n >= 0; --n) {
    const auto e = (n == 0)
                       ? mlf::MlfEval{1.0, 0.0, mlf::MlfMethod::power_series}
                       : mlf::mlf(params.nu, -params.b * static_cast<double>(n) *
                                                 std::pow(t, params.nu));
    kahan_add(sum, comp, e.value * qx[n] * qy[n]);
    mlf_err += e.abs_err_bound * std::abs(qx[n] * qy[n]);
  }
  const double value = mx * sum;
  double err = mx * mlf_err;
  if (certified)
    err += tail;
  else
    err += mx * std::abs(qx[N] * qy[N]);  // uncertified estimate
  return {value, err, certified};
}

namespace {

SolutionSurface solve_series(const charlier::SpectralCoefficients& coeffs,
                             const std::function<double(long)>& datum,
                             const Eigen::VectorXd& t_grid, long x_max,
                             const ModelParams& params,
                             const TruncationPolicy& policy, Problem problem) {
  const double alpha = params.alpha();
  const long N = coeffs.coeffs.size() - 1;

  Eigen::MatrixXd Q(x_max + 1, N + 1);
  for (long x = 0; x <= x_max; ++x)
    Q.row(x) = charlier::charlier_q_all(N, x, alpha).transpose();

  SolutionSurface surf;
  surf.times = t_grid;
  surf.x_max = x_max;
  surf.problem = problem;
  surf.values.resize(t_grid.size(), x_max + 1);

  double max_err = 0.0;
  for (long ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    if (t < 0.0) throw std::invalid_argument("solve: negative time");
    if (t == 0.0) {
      // exact-return contract at t = 0
      for (long x = 0; x <= x_max; ++x) surf.values(ti, x) = datum(x);
      continue;
    }
    Eigen::VectorXd relax(N + 1);
    double mlf_err = 0.0;
    relax[0] = 1.0;
    for (long n = 1; n <= N; ++n) {
      const auto e = mlf::mlf(params.nu, -params.b * static_cast<double>(n) *
                                             std::pow(t, params.nu));
      relax[n] = e.value;
      mlf_err = std::max(mlf_err, e.abs_err_bound);
    }
    for (long x = 0; x <= x_max; ++x) {
      double sum = 0.0, comp = 0.0;
      for (long n = N; n >= 0; --n)
        kahan_add(sum, comp, coeffs.coeffs[n] * relax[n] * Q(x, n));
      const double mx =
          problem == Problem::forward ? charlier::poisson_mass(x, alpha) : 1.0;
      surf.values(ti, x) = mx * sum;
      // datum modes beyond N, via the Cauchy-Schwarz chain
      const double dx = std::exp(charlier::log_norm_constant(x, alpha));
      const double trunc = std::sqrt(coeffs.norm_sq_tail) *
                           std::exp(0.5 * alpha) * dx *
                           relaxation_bound(N + 1, t, params);
      const double local_err =
          mx * (trunc + (mlf_err + 1e-16) * coeffs.coeffs.cwiseAbs().dot(
                                                Q.row(x).cwiseAbs().transpose()));
      max_err = std::max(max_err, local_err);
    }
  }
  surf.err_bound = max_err;
  return surf;
}

}  // namespace

SolutionSurface solve_backward(const std::function<double(long)>& g,
                               const Eigen::VectorXd& t_grid, long x_max,
                               const ModelParams& params,
                               const TruncationPolicy& policy, Growth growth) {
  const auto coeffs = charlier::decompose(g, params, policy, growth);
  return solve_series(coeffs, g, t_grid, x_max, params, policy, Problem::backward);
}

SolutionSurface solve_forward(const std::function<double(long)>& f,
                              const Eigen::VectorXd& t_grid, long x_max,
                              const ModelParams& params,
                              const TruncationPolicy& policy, bool is_pmf,
                              Growth growth) {
  const double alpha = params.alpha();
  const auto ratio = [&](long x) {
    return f(x) / charlier::poisson_mass(x, alpha);
  };
  const auto coeffs = charlier::decompose(ratio, params, policy, growth);
  if (is_pmf && std::abs(coeffs.coeffs[0] - 1.0) > 1e-8)
    throw std::invalid_argument("solve_forward: pmf datum must have f_0 = 1");
  return solve_series(coeffs, f, t_grid, x_max, params, policy, Problem::forward);
}

PmfVector limit_distribution(const ModelParams& params, double tail_tol) {
  const double alpha = params.alpha();
  const long X = charlier::poisson_support_bound(alpha, tail_tol);
  PmfVector pmf;
  pmf.probs.resize(X + 1);
  for (long x = 0; x <= X; ++x) pmf.probs[x] = charlier::poisson_mass(x, alpha);
  pmf.tail_mass_bound = tail_tol;
  return pmf;
}

double autocovariance(double t, double s, const ModelParams& params,
                      double quad_tol) {
  if (!(s > 0.0 && s <= t))
    throw std::invalid_argument("autocovariance: requires 0 < s <= t");
  const double nu = params.nu;
  const double alpha = params.alpha();
  const double btnu = params.b * std::pow(t, nu);
  const double e0 = mlf::mlf(nu, -btnu).value;
  // z = w^{1/nu} removes the z^{nu-1} endpoint singularity exactly
  const double W = std::pow(s / t, nu);
  const double inv_nu = 1.0 / nu;
  const auto f = [&](double w) {
    const double one_minus = 1.0 - std::pow(w, inv_nu);
    const double arg = -btnu * std::pow(std::max(one_minus, 0.0), nu);
    return mlf::mlf(nu, std::min(arg, 0.0)).value;
  };
  const double gamma1nu = std::tgamma(1.0 + nu);
  const double scale = alpha * btnu / gamma1nu;
  std::vector<double> pts{0.0, 0.5 * W, 0.9 * W, 0.99 * W, W};
  auto q = quad::integrate_segmented(f, pts, quad_tol / std::max(scale, 1.0));
  if (!q.converged)
    throw std::runtime_error("autocovariance: quadrature did not converge");
  return alpha * (e0 + btnu / gamma1nu * q.value);
}

double caputo_residual(const SolutionSurface& surface, const ModelParams& params,
                       double window_start_fraction) {
  const long M = surface.times.size() - 1;
  if (M < 2) throw std::invalid_argument("caputo_residual: need at least 3 times");
  if (surface.times[0] != 0.0)
    throw std::invalid_argument("caputo_residual: grid must start at t = 0");
  const double h = surface.times[1] - surface.times[0];
  for (long j = 1; j <= M; ++j)
    if (std::abs(surface.times[j] - j * h) > 1e-9 * surface.times[M])
      throw std::invalid_argument("caputo_residual: non-uniform grid");

  const double t_start = window_start_fraction * surface.times[M];
  double max_res = 0.0;
  for (long x = 0; x < surface.x_max; ++x) {
    Eigen::VectorXd ux = surface.values.col(x);
    Eigen::VectorXd dnu;
    if (params.nu < 1.0) {
      dnu = ops::caputo_derivative_numeric(ux, h, params.nu, true);
    } else {
      dnu.resize(M);  // central differences, one-sided at the end
      for (long j = 1; j < M; ++j) dnu[j - 1] = (ux[j + 1] - ux[j - 1]) / (2 * h);
      dnu[M - 1] = (3 * ux[M] - 4 * ux[M - 1] + ux[M - 2]) / (2 * h);
    }
    for (long j = 1; j <= M; ++j) {
      if (surface.times[j] < t_start) continue;
      ops::LatticeFunction row(surface.values.row(j).transpose());
      const double spatial = surface.problem == Problem::backward
                                 ? ops::apply_generator(row, x, params)
                                 : ops::apply_forward(row, x, params);
      max_res = std::max(max_res, std::abs(dnu[j - 1] - spatial));
    }
  }
  return max_res;
}

}  // namespace fid::spectral
