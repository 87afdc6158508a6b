#ifndef FID_STOCHASTIC_HPP
#define FID_STOCHASTIC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "fid/model.hpp"
#include "fid/spectral.hpp"

namespace fid::stochastic {

/// Deterministic per-path generator keyed by (seed, path index), so paths
/// are independent and insensitive to execution order.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path_index);

/// One immigration-death trajectory: right-continuous piecewise-constant,
/// states change by exactly +-1.
struct CtmcPath {
  long initial_state;
  std::vector<double> jump_times;   // strictly increasing, within horizon
  std::vector<long> states;        // states[i] = state after jump_times[i]
  double horizon;

  long state_at(double t) const;
};

CtmcPath simulate_ctmc(long x0, double horizon, const ModelParams& params,
                       std::mt19937_64& rng);
CtmcPath simulate_ctmc(long x0, double horizon, const ModelParams& params,
                       std::uint64_t rng_seed);

/// Extends a path in place to a new horizon, continuing from its last state.
void extend_ctmc(CtmcPath& path, double new_horizon, const ModelParams& params,
                 std::mt19937_64& rng);

/// One draw of sigma_nu(1), the standard nu-stable subordinator at time 1
/// (Laplace transform e^{-s^nu}), by the exact transform method.
double sample_stable(double nu, std::mt19937_64& rng);
double sample_stable(double nu, std::uint64_t rng_seed);

/// Series evaluation of the density of sigma_nu(1) with an alternating
/// -series error bound. Throws std::domain_error where the series cannot
/// certify the requested accuracy (small x).
struct DensityValue {
  double value;
  double err_bound;
};
DensityValue stable_density(double nu, double x, int series_terms = 200);

/// Density f_nu(y, t) of the inverse subordinator L_nu(t).
DensityValue inverse_density(double y, double t, double nu);

/// First-passage levels of a simulated subordinator path at the requested
/// times. The path is a random walk in internal-time steps of size
/// `resolution`; value() reports the bracket midpoint.
struct InversePath {
  Eigen::VectorXd t_grid;
  Eigen::VectorXd level_lo, level_hi;   // internal-time bracket, hi-lo = resolution
  Eigen::VectorXd sigma_lo, sigma_hi;   // subordinator values at the bracket
  double resolution;

  double value(long i) const { return 0.5 * (level_lo[i] + level_hi[i]); }
};

InversePath inverse_subordinator(const Eigen::VectorXd& t_grid, double nu,
                                 std::mt19937_64& rng, double resolution = 1e-4);
InversePath inverse_subordinator(const Eigen::VectorXd& t_grid, double nu,
                                 std::uint64_t rng_seed, double resolution = 1e-4);

/// Exact draw of the marginal L_nu(t) = (t / sigma_nu(1))^nu; used as an
/// independent cross-check of the path construction.
double sample_inverse_marginal(double t, double nu, std::mt19937_64& rng);

/// Fractional immigration-death path: N_nu(t) = N_1(L_nu(t)) with the
/// chain and the clock independent.
struct FidPath {
  Eigen::VectorXd t_grid;
  std::vector<long> states;
};

FidPath simulate_fid(long x0, const Eigen::VectorXd& t_grid,
                     const ModelParams& params, std::mt19937_64& rng,
                     double resolution = 1e-4);
FidPath simulate_fid(long x0, const Eigen::VectorXd& t_grid,
                     const ModelParams& params, std::uint64_t rng_seed,
                     double resolution = 1e-4);

struct McEstimate {
  double value;
  double std_error;
  long n_paths;
  std::uint64_t seed;
};

/// Empirical transition pmf of N_nu(t) from x0, with per-state binomial
/// standard errors.
struct McPmf {
  spectral::PmfVector pmf;
  std::vector<McEstimate> per_state;
  long n_paths;
  std::uint64_t seed;
};

McPmf mc_transition_pmf(long x0, double t, const ModelParams& params,
                        long n_paths, std::uint64_t rng_seed,
                        double resolution = 1e-4);

/// Stationary-start (x0 ~ Poisson(alpha)) sample covariance of
/// (N_nu(t), N_nu(s)).
McEstimate mc_autocovariance(double t, double s, const ModelParams& params,
                             long n_paths, std::uint64_t rng_seed,
                             double resolution = 1e-4);

/// Empirical mean of N_nu(t) from a fixed start.
McEstimate mc_conditional_mean(long x0, double t, const ModelParams& params,
                               long n_paths, std::uint64_t rng_seed,
                               double resolution = 1e-4);

}  // namespace fid::stochastic

#endif  // FID_STOCHASTIC_HPP
