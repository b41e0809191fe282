#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pw/emd.hpp"
#include "pw/errors.hpp"
#include "test_helpers.hpp"

using namespace pw;

namespace {

CostMatrix make_cost(const Eigen::MatrixXd& entries) {
  CostMatrix c;
  c.entries = entries;
  return c;
}

Eigen::MatrixXd random_cost(Eigen::Index n, Eigen::Index m,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = unif(rng);
  return c;
}

}  // namespace

TEST_CASE("solve_emd: single cell") {
  Eigen::MatrixXd c(1, 1);
  c << 0.0;
  const auto res = solve_emd(make_cost(c), Eigen::VectorXd::Ones(1),
                             Eigen::VectorXd::Ones(1));
  CHECK(res.plan.coupling(0, 0) == doctest::Approx(1.0));
  CHECK(res.cost == 0.0);
}

TEST_CASE("solve_emd: zero-cost matching found") {
  Eigen::MatrixXd c(2, 2);
  c << 0, 1, 1, 0;
  Eigen::Vector2d w(0.5, 0.5);
  const auto res = solve_emd(make_cost(c), w, w);
  CHECK(res.cost == doctest::Approx(0.0));
  CHECK(res.plan.coupling(0, 0) == doctest::Approx(0.5));
  CHECK(res.plan.coupling(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("solve_emd: 2x2 with asymmetric marginals") {
  // Brute force over the 2x2 polytope (x11 in {0.1, 0.4}) gives cost 1.3
  // with plan [[0.4, 0.3], [0, 0.3]].
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 3, 1;
  const auto res = solve_emd(make_cost(c), Eigen::Vector2d(0.7, 0.3),
                             Eigen::Vector2d(0.4, 0.6));
  CHECK(res.cost == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(res.plan.coupling(0, 0) == doctest::Approx(0.4));
  CHECK(res.plan.coupling(0, 1) == doctest::Approx(0.3));
  CHECK(res.plan.coupling(1, 0) == doctest::Approx(0.0));
  CHECK(res.plan.coupling(1, 1) == doctest::Approx(0.3));
}

TEST_CASE("solve_emd: marginal validation") {
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 3, 1;
  CHECK_THROWS_AS(solve_emd(make_cost(c), Eigen::Vector2d(0.7, 0.4),
                            Eigen::Vector2d(0.4, 0.6)),
                  InfeasibleMarginals);
  CHECK_THROWS_AS(solve_emd(make_cost(c), Eigen::Vector2d(-0.1, 1.1),
                            Eigen::Vector2d(0.4, 0.6)),
                  InfeasibleMarginals);
  CHECK_THROWS_AS(
      solve_emd(make_cost(c), Eigen::Vector3d(0.3, 0.3, 0.4).eval(),
                Eigen::Vector2d(0.4, 0.6)),
      DimensionMismatch);
}

TEST_CASE("solve_emd: pivot cap raises NonConvergence") {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd c = random_cost(12, 12, rng);
  EmdOptions opts;
  opts.max_pivots = 1;
  CHECK_THROWS_AS(solve_emd(make_cost(c), pwtest::random_simplex(12, rng),
                            pwtest::random_simplex(12, rng), opts),
                  NonConvergence);
}

TEST_CASE("solve_emd matches the brute-force vertex enumerator (n,m <= 4)") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> size(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng), m = size(rng);
    const Eigen::MatrixXd c = random_cost(n, m, rng);
    const Eigen::VectorXd p = pwtest::random_simplex(n, rng);
    const Eigen::VectorXd q = pwtest::random_simplex(m, rng);
    const auto res = solve_emd(make_cost(c), p, q);
    const double brute = pwtest::brute_force_emd(c, p, q);
    CHECK(res.cost == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("solve_emd invariants: marginals, duality, basic support") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> size(2, 30);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size(rng), m = size(rng);
    const Eigen::MatrixXd c = random_cost(n, m, rng);
    const Eigen::VectorXd p = pwtest::random_simplex(n, rng);
    const Eigen::VectorXd q = pwtest::random_simplex(m, rng);
    const auto res = solve_emd(make_cost(c), p, q);

    REQUIRE(res.plan.marginal_error() < 1e-9);
    CHECK(res.plan.coupling.minCoeff() >= 0.0);

    // basic feasible solution: at most n + m - 1 entries above 1e-12
    Eigen::Index above = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (res.plan.coupling(i, j) > 1e-12) ++above;
    CHECK(above <= n + m - 1);

    // dual feasibility and strong duality
    double worst = -1e300;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        worst = std::max(worst,
                         res.duals.alpha(i) + res.duals.beta(j) - c(i, j));
    CHECK(worst <= 1e-7);
    const double dual_value = res.duals.alpha.dot(p) + res.duals.beta.dot(q);
    CHECK(dual_value == doctest::Approx(res.cost).epsilon(1e-7));

    // alpha pinned to zero weighted mean
    CHECK(std::abs(res.duals.alpha.dot(p)) < 1e-9);
  }
}

TEST_CASE("wasserstein2: trivial values") {
  std::mt19937_64 rng(24);
  const auto a = pwtest::random_weighted_cloud(8, 2, rng);
  CHECK(wasserstein2(a, a) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 0, 0;
  y << 2, 0;
  CHECK(wasserstein2(DiscreteMeasure::uniform(x),
                     DiscreteMeasure::uniform(y)) == doctest::Approx(2.0));
}

TEST_CASE("wasserstein2: crossed pairs need sqrt(2)") {
  // Both pairings cost 2 under the squared metric, so W2 = sqrt(2).
  Eigen::MatrixXd x(2, 2), y(2, 2);
  x << 1, 0, -1, 0;
  y << 0, 1, 0, -1;
  CHECK(wasserstein2(DiscreteMeasure::uniform(x), DiscreteMeasure::uniform(y)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("wasserstein2: symmetry and triangle inequality") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = pwtest::random_weighted_cloud(7, 2, rng);
    const auto b = pwtest::random_weighted_cloud(9, 2, rng);
    const auto c = pwtest::random_weighted_cloud(5, 2, rng);
    const double ab = wasserstein2(a, b);
    const double ba = wasserstein2(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
    CHECK(ab <= wasserstein2(a, c) + wasserstein2(c, b) + 1e-7);
  }
}

TEST_CASE("wasserstein2: dimension mismatch") {
  std::mt19937_64 rng(26);
  const auto a = pwtest::random_cloud(4, 2, rng);
  const auto b = pwtest::random_cloud(4, 3, rng);
  CHECK_THROWS_AS(wasserstein2(a, b), DimensionMismatch);
}
