#include "pw/dense_kmeans.hpp"

#include <limits>
#include <random>
#include <vector>

#include "pw/errors.hpp"

namespace pw {

Eigen::MatrixXd dense_kmeans(const Eigen::MatrixXd& points, int k,
                             std::uint64_t seed, int iters) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (k < 1 || k > n) throw Error("kmeans: need 1 <= k <= point count");

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centroids(k, d);

  // k-means++ seeding.
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));
  Eigen::VectorXd d2 =
      (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      chosen = first(rng);  // all points coincide with chosen centroids
    }
    centroids.row(c) = points.row(chosen);
    d2 = d2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> label(n, 0);
  for (int sweep = 0; sweep < iters; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double dist =
            (points.row(i) - centroids.row(c)).squaredNorm();
        if (dist < best) {
          best = dist;
          arg = c;
        }
      }
      if (arg != label[i]) {
        label[i] = arg;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(label[i]) += points.row(i);
      ++counts[label[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centroids.row(c) = sums.row(c) / counts[c];
    if (!changed && sweep > 0) break;
  }
  return centroids;
}

}  // namespace pw
