#include <random>

#include "doctest.h"
#include "pw/errors.hpp"
#include "pw/sinkhorn.hpp"
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

TEST_CASE("sinkhorn: huge epsilon gives the product coupling") {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd c = random_cost(6, 8, rng);
  const Eigen::VectorXd p = pwtest::random_simplex(6, rng);
  const Eigen::VectorXd q = pwtest::random_simplex(8, rng);
  // Deviation from the product coupling shrinks like max|c| / epsilon.
  SinkhornConfig cfg;
  cfg.epsilon = 1e3;
  auto res = sinkhorn(make_cost(c), p, q, cfg);
  CHECK((res.plan.coupling - p * q.transpose()).cwiseAbs().maxCoeff() < 1e-4);
  cfg.epsilon = 1e7;
  res = sinkhorn(make_cost(c), p, q, cfg);
  CHECK((res.plan.coupling - p * q.transpose()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sinkhorn: small epsilon approaches the exact optimum") {
  Eigen::MatrixXd c(2, 2);
  c << 0, 1, 1, 0;
  Eigen::Vector2d w(0.5, 0.5);
  SinkhornConfig cfg;
  cfg.epsilon = 0.01;
  const auto res = sinkhorn(make_cost(c), w, w, cfg);
  CHECK(res.transport_cost == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(res.plan.coupling.minCoeff() > 0.0);  // dense plan
}

TEST_CASE("sinkhorn: single cell") {
  Eigen::MatrixXd c(1, 1);
  c << 3.5;
  const auto res = sinkhorn(make_cost(c), Eigen::VectorXd::Ones(1),
                            Eigen::VectorXd::Ones(1), {});
  CHECK(res.plan.coupling(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.transport_cost == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("sinkhorn: transport cost decreases toward EMD as epsilon drops") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd c = random_cost(10, 12, rng);
    const Eigen::VectorXd p = pwtest::random_simplex(10, rng);
    const Eigen::VectorXd q = pwtest::random_simplex(12, rng);
    const double exact = solve_emd(make_cost(c), p, q).cost;
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {1.0, 0.1, 0.01}) {
      SinkhornConfig cfg;
      cfg.epsilon = eps;
      const auto res = sinkhorn(make_cost(c), p, q, cfg);
      CHECK(res.transport_cost <= previous + 1e-9);
      CHECK(res.transport_cost >= exact - 1e-9);
      CHECK(std::abs(res.transport_cost - exact) <=
            10.0 * eps * std::log(10.0 * 12.0));
      previous = res.transport_cost;
    }
  }
}

TEST_CASE("sinkhorn: marginals honored to tolerance") {
  std::mt19937_64 rng(33);
  const Eigen::MatrixXd c = random_cost(15, 9, rng);
  const Eigen::VectorXd p = pwtest::random_simplex(15, rng);
  const Eigen::VectorXd q = pwtest::random_simplex(9, rng);
  for (double eps : {0.5, 0.02}) {
    SinkhornConfig cfg;
    cfg.epsilon = eps;
    const auto res = sinkhorn(make_cost(c), p, q, cfg);
    CHECK(res.plan.marginal_error() < 1e-9);
  }
}

TEST_CASE("sinkhorn: argument symmetry transposes the plan") {
  std::mt19937_64 rng(34);
  const Eigen::MatrixXd c = random_cost(7, 5, rng);
  const Eigen::VectorXd p = pwtest::random_simplex(7, rng);
  const Eigen::VectorXd q = pwtest::random_simplex(5, rng);
  for (double eps : {0.3, 0.02}) {
    SinkhornConfig cfg;
    cfg.epsilon = eps;
    const auto fwd = sinkhorn(make_cost(c), p, q, cfg);
    const auto bwd = sinkhorn(make_cost(c.transpose()), q, p, cfg);
    CHECK((fwd.plan.coupling - bwd.plan.coupling.transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("sinkhorn: regularized cost combines transport and entropy") {
  std::mt19937_64 rng(35);
  const Eigen::MatrixXd c = random_cost(5, 5, rng);
  const Eigen::VectorXd p = pwtest::random_simplex(5, rng);
  const Eigen::VectorXd q = pwtest::random_simplex(5, rng);
  SinkhornConfig cfg;
  cfg.epsilon = 0.2;
  const auto res = sinkhorn(make_cost(c), p, q, cfg);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double g = res.plan.coupling(i, j);
      if (g > 0) entropy += g * std::log(g);
    }
  CHECK(res.regularized_cost ==
        doctest::Approx(res.transport_cost + 0.2 * entropy).epsilon(1e-12));
}

TEST_CASE("sinkhorn: error paths") {
  Eigen::MatrixXd c(2, 2);
  c << 0, 1, 1, 0;
  Eigen::Vector2d w(0.5, 0.5);
  SinkhornConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(sinkhorn(make_cost(c), w, w, bad), Error);
  SinkhornConfig tiny;
  tiny.epsilon = 0.005;
  tiny.max_iters = 2;
  tiny.marginal_tol = 1e-14;
  CHECK_THROWS_AS(sinkhorn(make_cost(c), Eigen::Vector2d(0.9, 0.1), w, tiny),
                  NonConvergence);
  CHECK_THROWS_AS(sinkhorn(make_cost(c), Eigen::Vector2d(0.9, 0.2), w, {}),
                  InfeasibleMarginals);
}
