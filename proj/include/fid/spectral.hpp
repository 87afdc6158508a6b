#ifndef FID_SPECTRAL_HPP
#define FID_SPECTRAL_HPP

#include <Eigen/Dense>
#include <functional>

#include "fid/charlier.hpp"
#include "fid/model.hpp"

namespace fid::spectral {

/// Finitely supported probability mass with a certificate for the
/// discarded tail.
struct PmfVector {
  Eigen::VectorXd probs;       // support 0..probs.size()-1
  double tail_mass_bound = 0;
};

enum class Problem { backward, forward };

/// u(t, x) on a rectangular (time, state) grid.
struct SolutionSurface {
  Eigen::VectorXd times;       // sorted, nonnegative
  long x_max;
  Eigen::MatrixXd values;      // times.size() x (x_max+1)
  Problem problem;
  double err_bound = 0;        // max certified series error over the grid
};

struct SeriesValue {
  double value;
  double err_bound;
  bool certified;
};

/// Fundamental solution p_nu(t, x; y): transition mass from y to x at
/// time t, via the Mittag-Leffler Charlier series. t = 0 returns the
/// Kronecker delta exactly.
SeriesValue fundamental_solution(double t, long x, long y,
                                 const ModelParams& params,
                                 const TruncationPolicy& policy);

/// Backward Cauchy solution u(t,x) = sum_n g_n E_nu(-b n t^nu) Q_n(x)
/// for initial datum g in l^2(m). t = 0 rows return the datum exactly.
SolutionSurface solve_backward(const std::function<double(long)>& g,
                               const Eigen::VectorXd& t_grid, long x_max,
                               const ModelParams& params,
                               const TruncationPolicy& policy,
                               Growth growth = Growth::polynomial);

/// Forward Cauchy solution u(t,x) = m(x) sum_n f_n E_nu(-b n t^nu) Q_n(x)
/// for initial datum f with f/m in l^2(m). If is_pmf, checks f_0 = 1.
SolutionSurface solve_forward(const std::function<double(long)>& f,
                              const Eigen::VectorXd& t_grid, long x_max,
                              const ModelParams& params,
                              const TruncationPolicy& policy,
                              bool is_pmf = false,
                              Growth growth = Growth::polynomial);

/// Poisson(alpha) limit/invariant distribution with certified tail bound.
PmfVector limit_distribution(const ModelParams& params, double tail_tol = 1e-14);

/// Stationary-start autocovariance Cov(N_nu(t), N_nu(s)), 0 < s <= t.
/// The z^{nu-1} endpoint singularity is removed analytically before
/// adaptive quadrature.
double autocovariance(double t, double s, const ModelParams& params,
                      double quad_tol = 1e-10);

/// Max over measured grid points and states of
/// |D^nu_t u - (G or L) u| for a surface on a uniform time grid.
/// Points with t < window_start_fraction * t_end are excluded: the t^nu
/// initial layer makes the pointwise L1 residual there non-convergent.
double caputo_residual(const SolutionSurface& surface, const ModelParams& params,
                       double window_start_fraction = 0.25);

}  // namespace fid::spectral

#endif  // FID_SPECTRAL_HPP
