#include "fid/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fid::stochastic {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path_index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (path_index * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  std::uint64_t b = splitmix64(s);
  return std::mt19937_64(b);
}

long CtmcPath::state_at(double t) const {
  if (t < 0.0) throw std::invalid_argument("state_at: t must be >= 0");
  if (t > horizon) throw std::invalid_argument("state_at: t beyond horizon");
  // last jump at or before t; right-continuous paths
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return initial_state;
  return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

CtmcPath simulate_ctmc(long x0, double horizon, const ModelParams& params,
                       std::mt19937_64& rng) {
  if (x0 < 0) throw std::invalid_argument("simulate_ctmc: x0 must be >= 0");
  if (!(horizon >= 0.0))
    throw std::invalid_argument("simulate_ctmc: horizon must be >= 0");
  CtmcPath path{x0, {}, {}, 0.0};
  extend_ctmc(path, horizon, params, rng);
  return path;
}

CtmcPath simulate_ctmc(long x0, double horizon, const ModelParams& params,
                       std::uint64_t rng_seed) {
  auto rng = path_rng(rng_seed, 0);
  return simulate_ctmc(x0, horizon, params, rng);
}

void extend_ctmc(CtmcPath& path, double new_horizon, const ModelParams& params,
                 std::mt19937_64& rng) {
  if (new_horizon < path.horizon)
    throw std::invalid_argument("extend_ctmc: horizon cannot shrink");
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // memorylessness lets the clock restart at the old horizon
  double t = path.horizon;
  long x = path.jump_times.empty() ? path.initial_state : path.states.back();
  for (;;) {
    const double rate = params.a + params.b * static_cast<double>(x);
    t += exp1(rng) / rate;
    if (t > new_horizon) break;
    x += (unif(rng) * rate < params.a) ? 1 : -1;
    path.jump_times.push_back(t);
    path.states.push_back(x);
  }
  path.horizon = new_horizon;
}

double sample_stable(double nu, std::mt19937_64& rng) {
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("sample_stable: nu must be in (0,1]");
  if (nu == 1.0) return 1.0;  // degenerate subordinator
  std::uniform_real_distribution<double> unif(0.0, kPi);
  std::exponential_distribution<double> exp1(1.0);
  double u = unif(rng);
  while (u == 0.0) u = unif(rng);
  const double e = exp1(rng);
  const double r = (1.0 - nu) / nu;
  // Kanter's representation, Laplace transform e^{-s^nu}; log space to
  // avoid overflow for nu near 0 or 1
  const double logx = std::log(std::sin(nu * u)) +
                      r * std::log(std::sin((1.0 - nu) * u)) -
                      std::log(std::sin(u)) / nu - r * std::log(e);
  return std::exp(logx);
}

double sample_stable(double nu, std::uint64_t rng_seed) {
  auto rng = path_rng(rng_seed, 0);
  return sample_stable(nu, rng);
}

DensityValue stable_density(double nu, double x, int series_terms) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("stable_density: nu must be in (0,1)");
  if (!(x > 0.0)) return {0.0, 0.0};
  // Pollard series
  //   g_nu(x) = (1/pi) sum_{k>=1} (-1)^{k+1} Gamma(nu k + 1)/k!
  //                               sin(pi nu k) x^{-nu k - 1};
  // the terms are enveloped by e_k = Gamma(nu k + 1)/k! x^{-nu k - 1}, so
  // once e_k contracts geometrically the tail is certified by e_{k+1}/(1-r)
  const double logx = std::log(x);
  const auto envelope = [&](int k) {
    return std::exp(std::lgamma(nu * k + 1.0) - std::lgamma(k + 1.0) -
                    (nu * k + 1.0) * logx);
  };
  double sum = 0.0, comp = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= series_terms; ++k) {
    const double env = envelope(k);
    const double term =
        (k % 2 == 1 ? 1.0 : -1.0) * std::sin(kPi * nu * k) * env;
    const double ratio = env / prev_env;
    prev_env = env;
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (ratio < 0.5 && env < 1e-16 * std::max(std::abs(sum), 1e-300)) {
      const double tail = envelope(k + 1) / (1.0 - ratio);
      return {sum / kPi, (tail + env) / kPi};
    }
  }
  throw std::domain_error("stable_density: series not certifiable at this x");
}

DensityValue inverse_density(double y, double t, double nu) {
  if (!(t > 0.0)) throw std::invalid_argument("inverse_density: t must be > 0");
  if (!(y > 0.0)) return {0.0, 0.0};
  const double arg = t * std::pow(y, -1.0 / nu);
  const auto g = stable_density(nu, arg);
  const double jac = (t / nu) * std::pow(y, -1.0 - 1.0 / nu);
  return {jac * g.value, jac * g.err_bound};
}

InversePath inverse_subordinator(const Eigen::VectorXd& t_grid, double nu,
                                 std::mt19937_64& rng, double resolution) {
  const long n = t_grid.size();
  if (n == 0) throw std::invalid_argument("inverse_subordinator: empty grid");
  for (long i = 0; i < n; ++i)
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1]))
      throw std::invalid_argument("inverse_subordinator: grid must be sorted, >= 0");
  if (!(resolution > 0.0))
    throw std::invalid_argument("inverse_subordinator: resolution must be > 0");

  InversePath out;
  out.t_grid = t_grid;
  out.resolution = resolution;
  out.level_lo.setZero(n);
  out.level_hi.setZero(n);
  out.sigma_lo.setZero(n);
  out.sigma_hi.setZero(n);

  if (nu == 1.0) {
    // deterministic clock: L(t) = t exactly
    out.level_lo = t_grid;
    out.level_hi = t_grid;
    out.sigma_lo = t_grid;
    out.sigma_hi = t_grid;
    return out;
  }

  const double step_scale = std::pow(resolution, 1.0 / nu);
  double sigma_prev = 0.0, sigma = 0.0;
  long k = 0;  // sigma == subordinator at internal time k * resolution
  for (long i = 0; i < n; ++i) {
    const double t = t_grid[i];
    if (t == 0.0) continue;  // L(0) = 0, zero-width bracket
    while (sigma <= t) {
      sigma_prev = sigma;
      sigma += step_scale * sample_stable(nu, rng);
      ++k;
    }
    out.level_lo[i] = (k - 1) * resolution;
    out.level_hi[i] = k * resolution;
    out.sigma_lo[i] = sigma_prev;
    out.sigma_hi[i] = sigma;
  }
  return out;
}

InversePath inverse_subordinator(const Eigen::VectorXd& t_grid, double nu,
                                 std::uint64_t rng_seed, double resolution) {
  auto rng = path_rng(rng_seed, 0);
  return inverse_subordinator(t_grid, nu, rng, resolution);
}

double sample_inverse_marginal(double t, double nu, std::mt19937_64& rng) {
  if (!(t >= 0.0))
    throw std::invalid_argument("sample_inverse_marginal: t must be >= 0");
  if (nu == 1.0) return t;
  // self-similarity: L(t) =d (t / sigma_nu(1))^nu
  return std::pow(t / sample_stable(nu, rng), nu);
}

FidPath simulate_fid(long x0, const Eigen::VectorXd& t_grid,
                     const ModelParams& params, std::mt19937_64& rng,
                     double resolution) {
  const auto clock = inverse_subordinator(t_grid, params.nu, rng, resolution);
  double horizon = 0.0;
  for (long i = 0; i < t_grid.size(); ++i)
    horizon = std::max(horizon, clock.value(i));
  const auto chain = simulate_ctmc(x0, horizon, params, rng);
  FidPath out;
  out.t_grid = t_grid;
  out.states.resize(static_cast<std::size_t>(t_grid.size()));
  for (long i = 0; i < t_grid.size(); ++i)
    out.states[static_cast<std::size_t>(i)] = chain.state_at(clock.value(i));
  return out;
}

FidPath simulate_fid(long x0, const Eigen::VectorXd& t_grid,
                     const ModelParams& params, std::uint64_t rng_seed,
                     double resolution) {
  auto rng = path_rng(rng_seed, 0);
  return simulate_fid(x0, t_grid, params, rng, resolution);
}

McPmf mc_transition_pmf(long x0, double t, const ModelParams& params,
                        long n_paths, std::uint64_t rng_seed,
                        double resolution) {
  if (n_paths < 1) throw std::invalid_argument("mc_transition_pmf: n_paths >= 1");
  Eigen::VectorXd t_grid(1);
  t_grid[0] = t;
  std::vector<long> counts;
  for (long i = 0; i < n_paths; ++i) {
    auto rng = path_rng(rng_seed, static_cast<std::uint64_t>(i));
    const long x = simulate_fid(x0, t_grid, params, rng, resolution).states[0];
    if (x >= static_cast<long>(counts.size()))
      counts.resize(static_cast<std::size_t>(x) + 1, 0);
    ++counts[static_cast<std::size_t>(x)];
  }
  McPmf out;
  out.n_paths = n_paths;
  out.seed = rng_seed;
  out.pmf.probs.resize(static_cast<long>(counts.size()));
  out.pmf.tail_mass_bound = 0.0;  // empirical support is exact
  const double n = static_cast<double>(n_paths);
  for (std::size_t x = 0; x < counts.size(); ++x) {
    const double p = static_cast<double>(counts[x]) / n;
    out.pmf.probs[static_cast<long>(x)] = p;
    out.per_state.push_back(
        {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n), n_paths, rng_seed});
  }
  return out;
}

McEstimate mc_autocovariance(double t, double s, const ModelParams& params,
                             long n_paths, std::uint64_t rng_seed,
                             double resolution) {
  if (!(s > 0.0 && s <= t))
    throw std::invalid_argument("mc_autocovariance: requires 0 < s <= t");
  if (n_paths < 2) throw std::invalid_argument("mc_autocovariance: n_paths >= 2");
  const double alpha = params.alpha();
  Eigen::VectorXd t_grid(2);
  t_grid[0] = s;
  t_grid[1] = t;
  // Poisson(alpha) start keeps the marginal law stationary, so the mean
  // alpha is known and the product estimator is unbiased
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n_paths; ++i) {
    auto rng = path_rng(rng_seed, static_cast<std::uint64_t>(i));
    std::poisson_distribution<long> pois(alpha);
    const long x0 = pois(rng);
    const auto path = simulate_fid(x0, t_grid, params, rng, resolution);
    const double z = (static_cast<double>(path.states[0]) - alpha) *
                     (static_cast<double>(path.states[1]) - alpha);
    sum += z;
    sum_sq += z * z;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return {mean, std::sqrt(var / n), n_paths, rng_seed};
}

McEstimate mc_conditional_mean(long x0, double t, const ModelParams& params,
                               long n_paths, std::uint64_t rng_seed,
                               double resolution) {
  if (n_paths < 2) throw std::invalid_argument("mc_conditional_mean: n_paths >= 2");
  Eigen::VectorXd t_grid(1);
  t_grid[0] = t;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n_paths; ++i) {
    auto rng = path_rng(rng_seed, static_cast<std::uint64_t>(i));
    const double x =
        static_cast<double>(simulate_fid(x0, t_grid, params, rng, resolution).states[0]);
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return {mean, std::sqrt(var / n), n_paths, rng_seed};
}

}  // namespace fid::stochastic
