#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "pw/errors.hpp"
#include "pw/kernels.hpp"
#include "pw/measure.hpp"
#include "test_helpers.hpp"

using namespace pw;

namespace {

Eigen::MatrixXd sorted_rows(Eigen::MatrixXd m) {
  std::vector<Eigen::VectorXd> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  std::sort(rows.begin(), rows.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              for (Eigen::Index c = 0; c < a.size(); ++c)
                if (a(c) != b(c)) return a(c) < b(c);
              return false;
            });
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = rows[i];
  return m;
}

}  // namespace

TEST_CASE("normalize: centering then unit-ball scale") {
  Eigen::MatrixXd pts(2, 2);
  pts << 2, 0, 0, 0;
  const auto out = normalize(DiscreteMeasure::uniform(pts));
  CHECK(out.support(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.support(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(out.support.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalize: max row norm rescaled to 1") {
  Eigen::MatrixXd pts(2, 2);
  pts << 3, 4, -3, -4;
  const auto out = normalize(DiscreteMeasure::uniform(pts));
  CHECK(out.support(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.support(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(out.support(1, 0) == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(out.support(1, 1) == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("normalize: degenerate support rejected") {
  Eigen::MatrixXd one(1, 2);
  one << 0, 0;
  CHECK_THROWS_AS(normalize(DiscreteMeasure::uniform(one)), DegenerateSupport);
  Eigen::MatrixXd same(3, 2);
  same << 1, 1, 1, 1, 1, 1;
  CHECK_THROWS_AS(normalize(DiscreteMeasure::uniform(same)),
                  DegenerateSupport);
}

TEST_CASE("normalize is idempotent") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto m = pwtest::random_weighted_cloud(12, 3, rng);
    const auto once = normalize(m);
    const auto twice = normalize(once);
    CHECK((once.support - twice.support).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(is_normalized(once));
  }
}

TEST_CASE("apply_isometry: identity returns the input") {
  std::mt19937_64 rng(12);
  const auto m = pwtest::random_cloud(7, 2, rng);
  std::vector<Eigen::Index> id{0, 1, 2, 3, 4, 5, 6};
  const auto out = apply_isometry(m, {id, OrthogonalMap::identity(2)});
  CHECK((out.support - m.support).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.weights - m.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_isometry: swap permutation swaps rows and weights") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1, 0, 0, 1;
  DiscreteMeasure m(pts, Eigen::Vector2d(0.3, 0.7));
  const auto out = apply_isometry(m, {{1, 0}, OrthogonalMap::identity(2)});
  CHECK(out.support(0, 1) == 1.0);
  CHECK(out.support(1, 0) == 1.0);
  CHECK(out.weights(0) == 0.7);
  CHECK(out.weights(1) == 0.3);
}

TEST_CASE("apply_isometry: reflection flips the second coordinate") {
  Eigen::MatrixXd pts(1, 2);
  pts << 0, 1;
  Eigen::Matrix2d refl;
  refl << 1, 0, 0, -1;
  const auto out = apply_isometry(DiscreteMeasure::uniform(pts),
                                  {{0}, OrthogonalMap(refl)});
  CHECK(out.support(0, 0) == 0.0);
  CHECK(out.support(0, 1) == -1.0);
}

TEST_CASE("apply_isometry preserves pairwise distances") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto m = pwtest::random_weighted_cloud(9, 3, rng);
    const auto out = apply_isometry(m, pwtest::random_iso(9, 3, rng, t % 2));
    for (Eigen::Index i = 0; i < m.size(); ++i)
      for (Eigen::Index j = i + 1; j < m.size(); ++j) {
        // match rows through the permutation-free distance multiset
        const double before =
            (m.support.row(i) - m.support.row(j)).norm();
        double best = 1e300;
        for (Eigen::Index k = 0; k < m.size(); ++k)
          for (Eigen::Index l = 0; l < m.size(); ++l)
            if (k != l)
              best = std::min(best,
                              std::abs((out.support.row(k) -
                                        out.support.row(l))
                                           .norm() -
                                       before));
        CHECK(best < 1e-12);
      }
  }
}

TEST_CASE("apply_isometry validates inputs") {
  std::mt19937_64 rng(14);
  const auto m = pwtest::random_cloud(4, 2, rng);
  CHECK_THROWS_AS(apply_isometry(m, {{0, 1, 2}, OrthogonalMap::identity(2)}),
                  DimensionMismatch);
  CHECK_THROWS_AS(
      apply_isometry(m, {{0, 1, 2, 3}, OrthogonalMap::identity(3)}),
      DimensionMismatch);
  CHECK_THROWS(PermutedIsometry({0, 0, 1, 2}, OrthogonalMap::identity(2)));
}

TEST_CASE("perturb: trivial config reproduces the input as a multiset") {
  std::mt19937_64 rng(15);
  const auto m = pwtest::random_cloud(20, 2, rng);
  PerturbationConfig cfg;
  cfg.rng_seed = 99;
  const auto out = perturb(m, cfg);
  REQUIRE(out.size() == m.size());
  CHECK((sorted_rows(out.support) - sorted_rows(m.support))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("perturb: rotation-only output is the input times one orthogonal map") {
  std::mt19937_64 rng(16);
  const auto m = pwtest::random_cloud(15, 3, rng);
  PerturbationConfig cfg;
  cfg.apply_random_rotation = true;
  cfg.rng_seed = 7;
  const auto out = perturb(m, cfg);
  // Pairwise distance multisets agree, so some permuted isometry links them.
  const Eigen::MatrixXd da =
      pw::kernels::pairwise_sq_dists(m.support, m.support);
  const Eigen::MatrixXd db =
      pw::kernels::pairwise_sq_dists(out.support, out.support);
  Eigen::VectorXd sa = Eigen::Map<const Eigen::VectorXd>(da.data(), da.size());
  Eigen::VectorXd sb = Eigen::Map<const Eigen::VectorXd>(db.data(), db.size());
  std::sort(sa.data(), sa.data() + sa.size());
  std::sort(sb.data(), sb.data() + sb.size());
  CHECK((sa - sb).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("perturb: counts and weights") {
  std::mt19937_64 rng(17);
  const auto m = pwtest::random_cloud(100, 2, rng);
  PerturbationConfig cfg;
  cfg.noise_sigma = 0.01;
  cfg.extra_vertex_count = 5;
  cfg.rng_seed = 42;
  const auto out = perturb(m, cfg);
  REQUIRE(out.size() == 105);
  CHECK((out.weights.array() - 1.0 / 105).abs().maxCoeff() < 1e-15);
  CHECK(is_normalized(out));
}

TEST_CASE("random_orthogonal obeys the map invariants") {
  std::mt19937_64 rng(18);
  for (Eigen::Index d : {2, 3, 5}) {
    const auto rot = random_orthogonal(d, rng);
    CHECK(rot.det() == doctest::Approx(1.0).epsilon(1e-9));
    const auto refl = random_orthogonal(d, rng, true);
    CHECK(refl.det() == doctest::Approx(-1.0).epsilon(1e-9));
  }
}
