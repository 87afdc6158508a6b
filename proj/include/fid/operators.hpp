#ifndef FID_OPERATORS_HPP
#define FID_OPERATORS_HPP

#include <Eigen/Dense>

#include "fid/model.hpp"

namespace fid::ops {

/// Function on {0,...,X} with the boundary convention f(-1) = 0.
/// Reads beyond the stored support throw.
class LatticeFunction {
 public:
  explicit LatticeFunction(Eigen::VectorXd values) : values_(std::move(values)) {}

  long x_max() const { return values_.size() - 1; }

  double operator()(long x) const {
    if (x == -1) return 0.0;
    if (x < -1 || x > x_max())
      throw std::out_of_range("LatticeFunction: access outside support");
    return values_[x];
  }

  const Eigen::VectorXd& values() const { return values_; }

 private:
  Eigen::VectorXd values_;
};

double nabla_plus(const LatticeFunction& f, long x);
double nabla_minus(const LatticeFunction& f, long x);
double delta(const LatticeFunction& f, long x);

/// Generator action (a - bx) nabla^- f + a Delta f, equal to
/// a nabla^+ f - b x nabla^- f.
double apply_generator(const LatticeFunction& f, long x, const ModelParams& params);

/// Forward-operator action a f(x-1) - (a + bx) f(x) + b(x+1) f(x+1),
/// with the x = 0 row reading -a f(0) + b f(1).
double apply_forward(const LatticeFunction& f, long x, const ModelParams& params);

enum class OperatorKind { generator, forward };

/// Tridiagonal truncation of the generator or forward operator on
/// {0,...,dim-1}. The last row simply drops the out-of-range coupling
/// (absorbing truncation); truncation_leak reports the dropped rate.
struct TruncatedOperatorMatrix {
  OperatorKind kind;
  Eigen::MatrixXd entries;
  double truncation_leak;
};

TruncatedOperatorMatrix truncated_matrix(OperatorKind kind, long dim,
                                         const ModelParams& params);

/// L1 discretization of the Caputo derivative of order nu on a uniform
/// grid t_j = j*h, j = 0..M. Returns the derivative at t_1..t_M.
/// With initial_layer_correction the first cell is integrated against the
/// model u(0) + c t^nu instead of a chord, which restores the O(h^{2-nu})
/// rate on solutions with a t^nu layer at the origin.
Eigen::VectorXd caputo_derivative_numeric(const Eigen::VectorXd& u, double h,
                                          double nu,
                                          bool initial_layer_correction = false);

}  // namespace fid::ops

#endif  // FID_OPERATORS_HPP
