#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace pw {

/// Plain Euclidean k-means (k-means++ seeding, Lloyd iterations) on the
/// rows of `points`. Returns the k centroid rows. Deterministic per seed.
Eigen::MatrixXd dense_kmeans(const Eigen::MatrixXd& points, int k,
                             std::uint64_t seed, int iters = 50);

}  // namespace pw
