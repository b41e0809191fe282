#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace pw {

/// Weighted point cloud: one support point per row, one probability per point.
/// Weights must be nonnegative and sum to one within 1e-12.
struct DiscreteMeasure {
  Eigen::MatrixXd support;  // n x d
  Eigen::VectorXd weights;  // length n

  DiscreteMeasure() = default;
  DiscreteMeasure(Eigen::MatrixXd support_in, Eigen::VectorXd weights_in);

  /// Uniform weights over the given points.
  static DiscreteMeasure uniform(Eigen::MatrixXd support_in);

  Eigen::Index size() const { return support.rows(); }
  Eigen::Index dim() const { return support.cols(); }
};

/// d x d orthogonal matrix; reflections (det = -1) are allowed.
struct OrthogonalMap {
  Eigen::MatrixXd matrix;

  OrthogonalMap() = default;
  explicit OrthogonalMap(Eigen::MatrixXd m);

  static OrthogonalMap identity(Eigen::Index d);
  Eigen::Index dim() const { return matrix.rows(); }
  double det() const { return matrix.determinant(); }
};

/// Row permutation paired with an orthogonal map; the relabel-and-rotate
/// transformations under which the PW distance is invariant.
struct PermutedIsometry {
  std::vector<Eigen::Index> permutation;  // image of each output row
  OrthogonalMap map;

  PermutedIsometry(std::vector<Eigen::Index> perm, OrthogonalMap m);
};

struct PerturbationConfig {
  double noise_sigma = 0.0;
  int extra_vertex_count = 0;
  bool apply_random_rotation = false;
  bool apply_random_reflection = false;
  std::uint64_t rng_seed = 0;
};

/// Center the support at the arithmetic mean of the rows and rescale so the
/// farthest point sits on the unit sphere. Weights pass through unchanged.
/// Throws DegenerateSupport when all points coincide.
DiscreteMeasure normalize(const DiscreteMeasure& measure);

/// True when the support already satisfies the normalize() postconditions.
bool is_normalized(const DiscreteMeasure& measure, double tol = 1e-9);

/// Row i of the result is row perm[i] of the input, right-multiplied by the map.
DiscreteMeasure apply_isometry(const DiscreteMeasure& measure,
                               const PermutedIsometry& iso);

/// Synthetic copy generator: jittered extra vertices, row shuffle, Gaussian
/// noise, optional random rotation/reflection, then re-normalization.
/// The output always carries uniform weights.
DiscreteMeasure perturb(const DiscreteMeasure& measure,
                        const PerturbationConfig& cfg);

/// Haar-ish random element of O(d) via QR of a Gaussian matrix. det is +1;
/// pass reflect = true to flip one column.
OrthogonalMap random_orthogonal(Eigen::Index d, std::mt19937_64& rng,
                                bool reflect = false);

/// Seeded uniformly random permutation of {0..n-1}.
std::vector<Eigen::Index> random_permutation(Eigen::Index n,
                                             std::mt19937_64& rng);

}  // namespace pw
