#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fid/mlf.hpp"
#include "fid/stochastic.hpp"

using namespace fid;
using namespace fid::stochastic;

TEST_CASE("path rng is deterministic and decorrelated across paths") {
  auto r1 = path_rng(42, 0);
  auto r2 = path_rng(42, 0);
  CHECK(r1() == r2());
  auto r3 = path_rng(42, 1);
  auto r4 = path_rng(43, 0);
  CHECK(r1() != r3());
  CHECK(r3() != r4());
}

TEST_CASE("ctmc paths respect the chain structure") {
  ModelParams params{2.0, 1.0, 1.0};
  auto rng = path_rng(7, 0);
  const auto path = simulate_ctmc(3, 20.0, params, rng);
  CHECK(path.state_at(0.0) == 3);
  long prev = path.initial_state;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
    CHECK(path.jump_times[i] > t_prev);
    CHECK(path.jump_times[i] <= path.horizon);
    CHECK(std::abs(path.states[i] - prev) == 1);
    CHECK(path.states[i] >= 0);
    t_prev = path.jump_times[i];
    prev = path.states[i];
  }
  CHECK(path.state_at(path.horizon) == prev);
  CHECK_THROWS_AS(path.state_at(path.horizon + 1.0), std::invalid_argument);
}

TEST_CASE("ctmc mean matches the immigration-death relaxation") {
  // E[N_1(t) | N_1(0) = x0] = x0 e^{-bt} + alpha (1 - e^{-bt})
  ModelParams params{2.0, 1.0, 1.0};
  const double t = 1.0;
  const long n = 20000, x0 = 6;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    auto rng = path_rng(11, static_cast<std::uint64_t>(i));
    const double x = simulate_ctmc(x0, t, params, rng).state_at(t);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  const double expect = x0 * std::exp(-t) + 2.0 * (1.0 - std::exp(-t));
  CHECK(std::abs(mean - expect) < 4.0 * se);
}

TEST_CASE("extending a path is consistent") {
  ModelParams params{1.0, 1.0, 1.0};
  auto rng = path_rng(3, 0);
  auto path = simulate_ctmc(2, 1.0, params, rng);
  const long mid_state = path.state_at(1.0);
  extend_ctmc(path, 3.0, params, rng);
  CHECK(path.horizon == 3.0);
  CHECK(path.state_at(1.0) == mid_state);
  CHECK_THROWS_AS(extend_ctmc(path, 2.0, params, rng), std::invalid_argument);
}

TEST_CASE("stable sampler reproduces the Laplace transform") {
  const long n = 40000;
  for (double nu : {0.5, 0.8}) {
    double sum = 0.0, sum_sq = 0.0;
    auto rng = path_rng(99, 0);
    for (long i = 0; i < n; ++i) {
      const double v = std::exp(-sample_stable(nu, rng));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(-1.0)) < 4.0 * se);
    CHECK(se < 0.01);
  }
  auto rng = path_rng(1, 0);
  CHECK(sample_stable(1.0, rng) == 1.0);
}

TEST_CASE("stable density: nu = 1/2 Levy closed form and certification") {
  // g_{1/2}(x) = x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi)), frozen checkpoints
  struct Ref {
    double x, value;
  };
  const Ref refs[] = {{0.5, 0.4839414490382867},
                      {1.0, 0.2196956447338612},
                      {3.0, 0.049948445783348767}};
  for (const auto& r : refs) {
    const auto g = stable_density(0.5, r.x);
    CHECK(std::abs(g.value - r.value) <= 1e-12 + g.err_bound);
  }
  // nu = 0.7 checkpoints frozen from 40-digit summation
  CHECK(stable_density(0.7, 1.0).value ==
        doctest::Approx(0.38739501014659249).epsilon(1e-11));
  CHECK(stable_density(0.7, 2.0).value ==
        doctest::Approx(0.10768834487433713).epsilon(1e-11));
  CHECK(stable_density(0.5, -1.0).value == 0.0);
  // deep left tail: the alternating series cannot certify itself there
  CHECK_THROWS_AS(stable_density(0.9, 0.05), std::domain_error);
}

TEST_CASE("inverse density: nu = 1/2 is half-normal") {
  // f_{1/2}(y, t) = e^{-y^2/(4t)} / sqrt(pi t)
  for (const double t : {0.5, 1.0, 2.0})
    for (double y = 0.2; y <= 1.4; y += 0.3) {
      const auto f = inverse_density(y, t, 0.5);
      const double expect = std::exp(-y * y / (4.0 * t)) / std::sqrt(M_PI * t);
      CHECK(std::abs(f.value - expect) <= 1e-10 + f.err_bound);
    }
  CHECK(inverse_density(0.0, 1.0, 0.5).value == 0.0);
  CHECK_THROWS_AS(inverse_density(0.5, -1.0, 0.5), std::invalid_argument);
}

TEST_CASE("inverse subordinator brackets and monotonicity") {
  Eigen::VectorXd t_grid(4);
  t_grid << 0.0, 0.5, 1.0, 2.0;
  auto rng = path_rng(5, 0);
  const auto p = inverse_subordinator(t_grid, 0.6, rng, 1e-3);
  for (long i = 1; i < 4; ++i) {
    CHECK(p.sigma_lo[i] <= t_grid[i]);
    CHECK(p.sigma_hi[i] > t_grid[i]);
    CHECK(p.level_hi[i] - p.level_lo[i] == doctest::Approx(1e-3));
    CHECK(p.value(i) >= p.value(i - 1));
  }
  CHECK(p.value(0) == 0.0);

  // nu = 1: deterministic clock
  const auto q = inverse_subordinator(t_grid, 1.0, rng, 1e-3);
  for (long i = 0; i < 4; ++i) CHECK(q.value(i) == t_grid[i]);
}

TEST_CASE("inverse marginal mean matches t^nu/Gamma(1+nu)") {
  const double nu = 0.7, t = 2.0;
  const long n = 40000;
  auto rng = path_rng(21, 0);
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double v = sample_inverse_marginal(t, nu, rng);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - std::pow(t, nu) / std::tgamma(1.0 + nu)) < 4.0 * se);
}

TEST_CASE("walk construction agrees with the exact marginal in distribution") {
  // compare E[e^{-L_nu(t)}] from the bracketed walk against E_nu(-t^nu)
  const double nu = 0.5, t = 1.0;
  const long n = 20000;
  Eigen::VectorXd t_grid(1);
  t_grid << t;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    auto rng = path_rng(77, static_cast<std::uint64_t>(i));
    const double v = std::exp(-inverse_subordinator(t_grid, nu, rng, 2e-3).value(0));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  const double expect = mlf::mlf(nu, -std::pow(t, nu)).value;
  CHECK(std::abs(mean - expect) < 4.0 * se + 1e-4);
}

TEST_CASE("simulate_fid is deterministic given (seed, path)") {
  ModelParams params{1.0, 1.0, 0.5};
  Eigen::VectorXd t_grid(3);
  t_grid << 0.5, 1.0, 2.0;
  const auto p1 = simulate_fid(3, t_grid, params, std::uint64_t{123}, 1e-3);
  const auto p2 = simulate_fid(3, t_grid, params, std::uint64_t{123}, 1e-3);
  CHECK(p1.states == p2.states);
}

TEST_CASE("monte carlo estimators have sane structure") {
  ModelParams params{1.0, 1.0, 0.5};
  const auto mc = mc_transition_pmf(2, 0.7, params, 3000, 9, 5e-3);
  CHECK(mc.pmf.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mc.n_paths == 3000);
  for (const auto& e : mc.per_state) CHECK(e.std_error <= 1.0 / std::sqrt(3000.0));

  const auto cm = mc_conditional_mean(5, 0.5, params, 2000, 10, 5e-3);
  CHECK(cm.value > 0.0);
  CHECK(cm.std_error > 0.0);

  const auto cov = mc_autocovariance(1.0, 0.5, params, 2000, 11, 5e-3);
  CHECK(std::isfinite(cov.value));
  CHECK(cov.std_error > 0.0);
  CHECK_THROWS_AS(mc_autocovariance(0.5, 1.0, params, 100, 1), std::invalid_argument);
}
