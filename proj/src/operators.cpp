#include "fid/operators.hpp"

#include <cmath>

#include "fid/quadrature.hpp"

namespace fid::ops {

double nabla_plus(const LatticeFunction& f, long x) { return f(x + 1) - f(x); }

double nabla_minus(const LatticeFunction& f, long x) { return f(x) - f(x - 1); }

double delta(const LatticeFunction& f, long x) {
  return f(x + 1) - 2.0 * f(x) + f(x - 1);
}

double apply_generator(const LatticeFunction& f, long x, const ModelParams& params) {
  return params.a * nabla_plus(f, x) -
         params.b * static_cast<double>(x) * nabla_minus(f, x);
}

double apply_forward(const LatticeFunction& f, long x, const ModelParams& params) {
  const double a = params.a, b = params.b;
  const double xd = static_cast<double>(x);
  return a * f(x - 1) - (a + b * xd) * f(x) + b * (xd + 1.0) * f(x + 1);
}

TruncatedOperatorMatrix truncated_matrix(OperatorKind kind, long dim,
                                         const ModelParams& params) {
  if (dim < 2) throw std::invalid_argument("truncated_matrix: dim must be >= 2");
  const double a = params.a, b = params.b;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  double leak = 0.0;
  for (long x = 0; x < dim; ++x) {
    const double xd = static_cast<double>(x);
    M(x, x) = -(a + b * xd);
    if (x > 0) M(x, x - 1) = (kind == OperatorKind::generator) ? b * xd : a;
    if (x + 1 < dim)
      M(x, x + 1) = (kind == OperatorKind::generator) ? a : b * (xd + 1.0);
    else
      leak = (kind == OperatorKind::generator) ? a : b * xd + b;
  }
  if (dim >= 1) M(0, 0) = -a;  // x = 0 row per the operator displays
  return {kind, std::move(M), leak};
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// J(j) = int_0^1 (j - w)^{-nu} w^{nu-1} dw, singularity removed by w = v^{1/nu}
double first_cell_kernel(long j, double nu) {
  if (j == 1) return kPi / std::sin(kPi * nu);
  const double inv_nu = 1.0 / nu;
  const auto f = [&](double v) {
    return std::pow(static_cast<double>(j) - std::pow(v, inv_nu), -nu);
  };
  return quad::integrate(f, 0.0, 1.0, 1e-13).value / nu;
}

}  // namespace

Eigen::VectorXd caputo_derivative_numeric(const Eigen::VectorXd& u, double h,
                                          double nu,
                                          bool initial_layer_correction) {
  const long M = u.size() - 1;
  if (M < 2) throw std::invalid_argument("caputo_derivative_numeric: need M >= 2");
  if (!(h > 0.0)) throw std::invalid_argument("caputo_derivative_numeric: h must be > 0");
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("caputo_derivative_numeric: nu must be in (0,1)");

  const double g2 = std::tgamma(2.0 - nu);
  const double g1 = std::tgamma(1.0 - nu);
  Eigen::VectorXd bk(M);
  for (long k = 0; k < M; ++k)
    bk[k] = std::pow(static_cast<double>(k + 1), 1.0 - nu) -
            std::pow(static_cast<double>(k), 1.0 - nu);

  Eigen::VectorXd out(M);
  const double hn = std::pow(h, nu);
  for (long j = 1; j <= M; ++j) {
    double s = 0.0, comp = 0.0;
    for (long k = 0; k < j; ++k) {
      const double term = bk[k] * (u[j - k] - u[j - k - 1]);
      const double y = term - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    out[j - 1] = s / (g2 * hn);
  }

  if (initial_layer_correction) {
    // model u ~ u(0) + c t^nu on the first cell instead of a chord
    const double c = (u[1] - u[0]) / hn;
    for (long j = 1; j <= M; ++j) {
      const double l1_first =
          (u[1] - u[0]) / h *
          (std::pow(j * h, 1.0 - nu) - std::pow((j - 1) * h, 1.0 - nu)) / g2;
      const double exact = c * nu / g1 * first_cell_kernel(j, nu);
      out[j - 1] += exact - l1_first;
    }
  }
  return out;
}

}  // namespace fid::ops
