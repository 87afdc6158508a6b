#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fid/charlier.hpp"
#include "fid/operators.hpp"

using namespace fid;
using namespace fid::ops;

TEST_CASE("difference operators and the zero boundary") {
  Eigen::VectorXd v(4);
  v << 2.0, 5.0, 3.0, 7.0;
  LatticeFunction f(v);
  CHECK(f(-1) == 0.0);
  CHECK(nabla_plus(f, 1) == -2.0);
  CHECK(nabla_minus(f, 1) == 3.0);
  CHECK(nabla_minus(f, 0) == 2.0);
  CHECK(delta(f, 1) == -5.0);
  CHECK_THROWS_AS(f(4), std::out_of_range);
}

TEST_CASE("generator matches its tridiagonal stencil") {
  ModelParams params{1.3, 0.7, 0.5};
  Eigen::VectorXd v(6);
  v << 1.0, -2.0, 0.5, 4.0, -1.0, 2.0;
  LatticeFunction f(v);
  for (long x = 0; x <= 4; ++x) {
    const double expect = params.a * (f(x + 1) - f(x)) -
                          params.b * x * (f(x) - f(x - 1));
    CHECK(apply_generator(f, x, params) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("forward operator is the transpose of the generator") {
  ModelParams params{2.0, 1.5, 0.8};
  const auto G = truncated_matrix(OperatorKind::generator, 25, params);
  const auto L = truncated_matrix(OperatorKind::forward, 25, params);
  CHECK((L.entries - G.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(G.truncation_leak == doctest::Approx(params.a));
  CHECK(L.truncation_leak == doctest::Approx(params.b * 25.0));
}

TEST_CASE("interior forward columns sum to zero (mass conservation)") {
  ModelParams params{1.0, 2.0, 0.5};
  const auto L = truncated_matrix(OperatorKind::forward, 20, params);
  const Eigen::VectorXd colsum = L.entries.colwise().sum();
  for (long x = 0; x < 19; ++x) CHECK(std::abs(colsum[x]) < 1e-13);
}

TEST_CASE("generator annihilates constants and kills Q_n with rate bn") {
  ModelParams params{1.5, 0.5, 0.5};
  const double alpha = params.alpha();
  const long X = 40;
  for (long n : {0L, 1L, 3L, 6L}) {
    Eigen::VectorXd v(X + 2);
    for (long x = 0; x <= X + 1; ++x) v[x] = *charlier::charlier_q(n, x, alpha);
    LatticeFunction f(v);
    for (long x = 0; x <= 12; ++x) {
      const double gq = apply_generator(f, x, params);
      const double expect = -params.b * static_cast<double>(n) * v[x];
      CHECK(std::abs(gq - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("discrete Pearson identity for the Poisson measure") {
  // nabla_plus(b z m(z))(x) = (a - b x) m(x)
  ModelParams params{1.2, 0.9, 0.5};
  const double alpha = params.alpha();
  Eigen::VectorXd zm(30);
  for (long z = 0; z < 30; ++z)
    zm[z] = params.b * z * charlier::poisson_mass(z, alpha);
  LatticeFunction f(zm);
  for (long x = 0; x <= 25; ++x) {
    const double lhs = nabla_plus(f, x);
    const double rhs = (params.a - params.b * x) * charlier::poisson_mass(x, alpha);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("L1 Caputo derivative against closed forms") {
  const double nu = 0.6;
  const long M = 800;
  const double T = 1.0, h = T / M;

  SUBCASE("linear function: D^nu t = t^{1-nu}/Gamma(2-nu)") {
    Eigen::VectorXd u(M + 1);
    for (long j = 0; j <= M; ++j) u[j] = j * h;
    const auto d = caputo_derivative_numeric(u, h, nu);
    for (long j = M / 4; j <= M; j += 50) {
      const double t = j * h;
      const double exact = std::pow(t, 1.0 - nu) / std::tgamma(2.0 - nu);
      CHECK(d[j - 1] == doctest::Approx(exact).epsilon(1e-6));
    }
  }

  SUBCASE("t^nu layer: D^nu t^nu = Gamma(1+nu), measured away from t = 0") {
    // scale invariance of t^nu makes the pointwise L1 error a function of
    // the step index alone, so only the windowed error (t >= T/4) decays
    const double exact = std::tgamma(1.0 + nu);
    auto windowed_errors = [&](long m) {
      const double step = T / m;
      Eigen::VectorXd u(m + 1);
      for (long j = 0; j <= m; ++j) u[j] = std::pow(j * step, nu);
      const auto plain = caputo_derivative_numeric(u, step, nu, false);
      const auto fixed = caputo_derivative_numeric(u, step, nu, true);
      double ep = 0.0, ef = 0.0;
      for (long j = m / 4; j <= m; ++j) {
        ep = std::max(ep, std::abs(plain[j - 1] - exact));
        ef = std::max(ef, std::abs(fixed[j - 1] - exact));
      }
      return std::pair{ep, ef};
    };
    const auto [p200, f200] = windowed_errors(200);
    const auto [p800, f800] = windowed_errors(800);
    CHECK(f200 <= p200);
    CHECK(f800 <= p800);
    CHECK(f800 < 1e-4);
    // empirical order ~ 2 - nu over the window
    const double order = std::log2(f200 / f800) / 2.0;
    CHECK(order > 2.0 - nu - 0.15);
  }

  SUBCASE("input validation") {
    Eigen::VectorXd u(2);
    u << 0.0, 1.0;
    CHECK_THROWS_AS(caputo_derivative_numeric(u, h, nu), std::invalid_argument);
    Eigen::VectorXd v(5);
    v.setZero();
    CHECK_THROWS_AS(caputo_derivative_numeric(v, -1.0, nu), std::invalid_argument);
    CHECK_THROWS_AS(caputo_derivative_numeric(v, h, 1.0), std::invalid_argument);
  }
}
