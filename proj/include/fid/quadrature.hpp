#ifndef FID_QUADRATURE_HPP
#define FID_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace fid::quad {

struct QuadResult {
  double value;
  double err_est;
  bool converged;
};

/// Adaptive Gauss-Kronrod 7/15 integration of f over [a, b] to absolute
/// tolerance abs_tol. Worst-error interval is bisected first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_intervals = 2000);

/// Same, but with caller-supplied initial breakpoints (sorted, spanning the
/// full range). Useful when the integrand mass is concentrated on a scale
/// the first Kronrod panel would miss.
QuadResult integrate_segmented(const std::function<double(double)>& f,
                               const std::vector<double>& breakpoints,
                               double abs_tol, int max_intervals = 4000);

}  // namespace fid::quad

#endif  // FID_QUADRATURE_HPP
