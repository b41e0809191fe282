#include <random>

#include "doctest.h"
#include "pw/errors.hpp"
#include "pw/pw_distance.hpp"
#include "test_helpers.hpp"

using namespace pw;

namespace {

TransportPlan diagonal_plan(Eigen::Index n) {
  TransportPlan plan;
  plan.coupling = Eigen::MatrixXd::Identity(n, n) / double(n);
  plan.row_marginal = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  plan.col_marginal = plan.row_marginal;
  return plan;
}

Eigen::Matrix2d rotation2(double radians) {
  Eigen::Matrix2d r;
  r << std::cos(radians), std::sin(radians), -std::sin(radians),
      std::cos(radians);
  return r;  // row-vector convention: x -> x R
}

}  // namespace

TEST_CASE("cost_with_map: single points") {
  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 1, 0;
  y << 0, 1;
  const auto a = DiscreteMeasure::uniform(x);
  const auto b = DiscreteMeasure::uniform(y);
  const auto c0 = cost_with_map(a, b, OrthogonalMap::identity(2));
  CHECK(c0.entries(0, 0) == doctest::Approx(2.0));

  // Rotate (0,1) onto (1,0) so the cost vanishes.
  for (double angle : {-M_PI / 2, M_PI / 2}) {
    const OrthogonalMap map{(Eigen::MatrixXd)rotation2(angle)};
    const Eigen::RowVector2d moved = y.row(0) * map.matrix;
    if ((moved - x.row(0)).norm() < 1e-12) {
      const auto c = cost_with_map(a, b, map);
      CHECK(c.entries(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("cost_with_map: identity map equals plain squared-Euclidean cost") {
  std::mt19937_64 rng(41);
  const auto a = pwtest::random_cloud(6, 3, rng);
  const auto b = pwtest::random_cloud(9, 3, rng);
  const auto c = cost_with_map(a, b, OrthogonalMap::identity(3));
  const auto plain = sq_euclidean_cost(a.support, b.support);
  CHECK((c.entries - plain.entries).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("cost_with_map: quadratic expansion identity") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = pwtest::random_weighted_cloud(8, 3, rng);
    const auto b = pwtest::random_weighted_cloud(6, 3, rng);
    const OrthogonalMap map = random_orthogonal(3, rng, trial % 2);
    const auto c = cost_with_map(a, b, map);
    const Eigen::MatrixXd expansion =
        c.squared_norms_left.replicate(1, 6) +
        c.squared_norms_right.transpose().replicate(8, 1) -
        2.0 * a.support * map.matrix.transpose() * b.support.transpose();
    CHECK((c.entries - expansion).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("procrustes_step: aligned inputs give the identity") {
  std::mt19937_64 rng(43);
  const auto a = pwtest::random_cloud(10, 3, rng);
  const auto p = procrustes_step(a, a, diagonal_plan(10));
  CHECK((p.matrix - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("procrustes_step: recovers a known rotation and reflection") {
  std::mt19937_64 rng(44);
  const auto y = pwtest::random_cloud(12, 2, rng);

  const Eigen::Matrix2d rot = rotation2(M_PI / 2);
  const DiscreteMeasure x_rot(y.support * rot, y.weights);
  const auto p_rot = procrustes_step(x_rot, y, diagonal_plan(12));
  CHECK((p_rot.matrix - rot).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::Matrix2d refl;
  refl << 1, 0, 0, -1;
  const DiscreteMeasure x_ref(y.support * refl, y.weights);
  const auto p_ref = procrustes_step(x_ref, y, diagonal_plan(12));
  CHECK((p_ref.matrix - refl).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(p_ref.det() == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("procrustes_step maximizes the cross term over O(d)") {
  std::mt19937_64 rng(45);
  const auto a = pwtest::random_weighted_cloud(7, 3, rng);
  const auto b = pwtest::random_weighted_cloud(7, 3, rng);
  TransportPlan plan;
  plan.coupling = a.weights * b.weights.transpose();  // product coupling
  plan.row_marginal = a.weights;
  plan.col_marginal = b.weights;
  const auto p = procrustes_step(a, b, plan);
  const Eigen::MatrixXd cross =
      b.support.transpose() * plan.coupling.transpose() * a.support;
  const double best = (p.matrix.transpose() * cross).trace();
  for (int t = 0; t < 200; ++t) {
    const auto q = random_orthogonal(3, rng, t % 2);
    CHECK((q.matrix.transpose() * cross).trace() <= best + 1e-9);
  }
}

TEST_CASE("pw_align: permuted isometric copy reaches zero in two iterations") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = pwtest::random_cloud(9, 2 + trial % 2, rng);
    const auto iso = pwtest::random_iso(9, a.dim(), rng, trial % 2);
    const auto b = apply_isometry(a, iso);

    // the permutation plan: row i of a matches row of b holding a's row i
    TransportPlan plan;
    plan.coupling = Eigen::MatrixXd::Zero(9, 9);
    for (Eigen::Index out = 0; out < 9; ++out)
      plan.coupling(iso.permutation[out], out) = 1.0 / 9.0;
    plan.row_marginal = a.weights;
    plan.col_marginal = b.weights;

    const auto sol = pw_align(a, b, plan);
    CHECK(sol.converged);
    CHECK(sol.iterations <= 2);
    CHECK(sol.cost <= 1e-12);
  }
}

TEST_CASE("pw_align: crossed pair is an exact rigid alignment") {
  Eigen::MatrixXd x(2, 2), y(2, 2);
  x << 1, 0, -1, 0;
  y << 0, 1, 0, -1;
  const auto sol = pw_align(DiscreteMeasure::uniform(x),
                            DiscreteMeasure::uniform(y), diagonal_plan(2));
  CHECK(sol.distance <= 1e-9);
}

TEST_CASE("pw_align: converged value bounded by W2 from the EMD start") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = pwtest::random_weighted_cloud(8, 2, rng);
    const auto b = pwtest::random_weighted_cloud(11, 2, rng);
    const auto emd =
        solve_emd(sq_euclidean_cost(a.support, b.support), a.weights,
                  b.weights);
    const auto sol = pw_align(a, b, emd.plan);
    const double w2 = wasserstein2(a, b);
    CHECK(sol.distance <= w2 + 1e-9);
  }
}

TEST_CASE("pw_align: objective trace is non-increasing") {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = pwtest::random_weighted_cloud(10, 2, rng);
    const auto b = pwtest::random_weighted_cloud(12, 2, rng);
    TransportPlan plan;
    plan.coupling = a.weights * b.weights.transpose();
    plan.row_marginal = a.weights;
    plan.col_marginal = b.weights;
    const auto sol = pw_align(a, b, plan);
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
      CHECK(sol.objective_trace[i] <= sol.objective_trace[i - 1] + 1e-9);
    CHECK(sol.cost == doctest::Approx(sol.objective_trace.back()));
    CHECK(sol.distance * sol.distance == doctest::Approx(sol.cost).epsilon(1e-12));
    // returned cost re-evaluates exactly against (plan, map)
    const auto c = cost_with_map(a, b, sol.map);
    const double direct = (c.entries.array() * sol.plan.coupling.array()).sum();
    CHECK(direct == doctest::Approx(sol.cost).epsilon(1e-9));
  }
}

TEST_CASE("pw_align: infeasible init plan rejected") {
  std::mt19937_64 rng(49);
  const auto a = pwtest::random_cloud(5, 2, rng);
  const auto b = pwtest::random_cloud(5, 2, rng);
  TransportPlan bad;
  bad.coupling = Eigen::MatrixXd::Constant(5, 5, 0.03);
  bad.row_marginal = a.weights;
  bad.col_marginal = b.weights;
  CHECK_THROWS_AS(pw_align(a, b, bad, {}), InfeasibleMarginals);
}

TEST_CASE("pw_distance: identical and mismatched inputs") {
  std::mt19937_64 rng(50);
  const auto a = pwtest::random_cloud(12, 2, rng);
  const auto sol = pw_distance(a, a, InitStrategy::emd_w());
  CHECK(sol.distance <= 1e-9);

  const auto c = pwtest::random_cloud(12, 3, rng);
  CHECK_THROWS_AS(pw_distance(a, c, InitStrategy::emd_w()),
                  DimensionMismatch);
}

TEST_CASE("pw_distance: rotated copy solved through the Fiedler start") {
  std::mt19937_64 rng(51);
  const auto a = pwtest::random_cloud(25, 2, rng);
  const auto b = apply_isometry(a, pwtest::random_iso(25, 2, rng, true));
  const auto sol = pw_distance(a, b, InitStrategy::fiedler_w(6));
  CHECK(sol.distance <= 1e-6);
}

TEST_CASE("pw_exact_oracle: validation and trivial values") {
  std::mt19937_64 rng(52);
  const auto a = pwtest::random_cloud(3, 2, rng);
  const auto same = pw_exact_oracle(a, a);
  CHECK(same.cost <= 1e-12);

  Eigen::MatrixXd x(2, 2), y(2, 2);
  x << 1, 0, -1, 0;
  y << 0, 1, 0, -1;
  CHECK(pw_exact_oracle(DiscreteMeasure::uniform(x),
                        DiscreteMeasure::uniform(y))
            .distance <= 1e-9);

  const auto big = pwtest::random_cloud(9, 2, rng);
  CHECK_THROWS_AS(pw_exact_oracle(big, big), TooLarge);
  const auto small = pwtest::random_cloud(4, 2, rng);
  const auto weighted = pwtest::random_weighted_cloud(4, 2, rng);
  CHECK_THROWS_AS(pw_exact_oracle(small, weighted), TooLarge);
}

TEST_CASE("pw_exact_oracle lower-bounds every initializer") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = pwtest::random_cloud(4, 2, rng);
    const auto b = pwtest::random_cloud(4, 2, rng);
    const double oracle = pw_exact_oracle(a, b).cost;
    for (const auto& init :
         {InitStrategy::emd_w(), InitStrategy::upca_w(),
          InitStrategy::euc_gw(50)}) {
      double cost = 0.0;
      try {
        cost = pw_distance(a, b, init).cost;
      } catch (const Error&) {
        continue;  // e.g. degenerate covariance for UPCA
      }
      CHECK(oracle <= cost + 1e-9);
    }
  }
}

TEST_CASE("pw_exact_oracle: rotation invariance of the value") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = pwtest::random_cloud(5, 2, rng);
    const auto b = pwtest::random_cloud(5, 2, rng);
    std::vector<Eigen::Index> id{0, 1, 2, 3, 4};
    const auto rotated =
        apply_isometry(b, {id, random_orthogonal(2, rng, trial % 2)});
    CHECK(pw_exact_oracle(a, rotated).cost ==
          doctest::Approx(pw_exact_oracle(a, b).cost).epsilon(1e-9));
  }
}

TEST_CASE("pw_align_entropic: trace decreases and transport part is close") {
  std::mt19937_64 rng(55);
  const auto a = pwtest::random_cloud(10, 2, rng);
  const auto b = apply_isometry(a, pwtest::random_iso(10, 2, rng));
  TransportPlan plan;
  plan.coupling = a.weights * b.weights.transpose();
  plan.row_marginal = a.weights;
  plan.col_marginal = b.weights;
  const auto sol = pw_align_entropic(a, b, plan, 0.05);
  for (std::size_t i = 1; i < sol.solution.objective_trace.size(); ++i)
    CHECK(sol.solution.objective_trace[i] <=
          sol.solution.objective_trace[i - 1] + 1e-7);
  CHECK(sol.solution.cost >= 0.0);
  CHECK(sol.regularized_cost <= sol.solution.cost + 1e-9);
}
