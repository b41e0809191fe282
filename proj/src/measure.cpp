#include "pw/measure.hpp"

#include <algorithm>
#include <cmath>

#include "pw/errors.hpp"

namespace pw {

namespace {

void check_weights(const Eigen::VectorXd& w) {
  if (w.size() < 1) throw Error("measure: empty weight vector");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0)
      throw Error("measure: weights must be finite and nonnegative");
  }
  if (std::abs(w.sum() - 1.0) > 1e-12)
    throw Error("measure: weights must sum to 1 within 1e-12");
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd support_in,
                                 Eigen::VectorXd weights_in)
    : support(std::move(support_in)), weights(std::move(weights_in)) {
  if (support.rows() < 1 || support.cols() < 1)
    throw Error("measure: support must be n x d with n,d >= 1");
  if (!support.allFinite())
    throw Error("measure: support coordinates must be finite");
  if (weights.size() != support.rows())
    throw DimensionMismatch("measure: weight count != point count");
  check_weights(weights);
}

DiscreteMeasure DiscreteMeasure::uniform(Eigen::MatrixXd support_in) {
  const Eigen::Index n = support_in.rows();
  return DiscreteMeasure(std::move(support_in),
                         Eigen::VectorXd::Constant(n, 1.0 / double(n)));
}

OrthogonalMap::OrthogonalMap(Eigen::MatrixXd m) : matrix(std::move(m)) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
    throw DimensionMismatch("orthogonal map: matrix must be square");
  const Eigen::Index d = matrix.rows();
  const Eigen::MatrixXd gram = matrix.transpose() * matrix;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw Error("orthogonal map: P^T P != I");
  if (std::abs(std::abs(matrix.determinant()) - 1.0) > 1e-9)
    throw Error("orthogonal map: |det| != 1");
}

OrthogonalMap OrthogonalMap::identity(Eigen::Index d) {
  return OrthogonalMap(Eigen::MatrixXd::Identity(d, d));
}

PermutedIsometry::PermutedIsometry(std::vector<Eigen::Index> perm,
                                   OrthogonalMap m)
    : permutation(std::move(perm)), map(std::move(m)) {
  std::vector<bool> seen(permutation.size(), false);
  for (Eigen::Index v : permutation) {
    if (v < 0 || v >= static_cast<Eigen::Index>(permutation.size()) || seen[v])
      throw Error("permuted isometry: permutation is not a bijection");
    seen[v] = true;
  }
}

DiscreteMeasure normalize(const DiscreteMeasure& measure) {
  Eigen::MatrixXd x = measure.support;
  const Eigen::RowVectorXd centroid = x.colwise().mean();
  x.rowwise() -= centroid;
  const double scale = x.rowwise().norm().maxCoeff();
  if (scale <= 1e-150)
    throw DegenerateSupport("normalize: all support points coincide");
  x /= scale;
  return DiscreteMeasure(std::move(x), measure.weights);
}

bool is_normalized(const DiscreteMeasure& measure, double tol) {
  const Eigen::RowVectorXd centroid = measure.support.colwise().mean();
  if (centroid.norm() > tol) return false;
  const double maxnorm = measure.support.rowwise().norm().maxCoeff();
  return std::abs(maxnorm - 1.0) <= tol;
}

DiscreteMeasure apply_isometry(const DiscreteMeasure& measure,
                               const PermutedIsometry& iso) {
  const Eigen::Index n = measure.size();
  if (static_cast<Eigen::Index>(iso.permutation.size()) != n)
    throw DimensionMismatch("apply_isometry: permutation length != n");
  if (iso.map.dim() != measure.dim())
    throw DimensionMismatch("apply_isometry: map dimension != d");
  Eigen::MatrixXd out(n, measure.dim());
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = measure.support.row(iso.permutation[i]) * iso.map.matrix;
    w(i) = measure.weights(iso.permutation[i]);
  }
  return DiscreteMeasure(std::move(out), std::move(w));
}

DiscreteMeasure perturb(const DiscreteMeasure& measure,
                        const PerturbationConfig& cfg) {
  if (!std::isfinite(cfg.noise_sigma) || cfg.noise_sigma < 0.0)
    throw Error("perturb: noise_sigma must be finite and >= 0");
  if (cfg.extra_vertex_count < 0)
    throw Error("perturb: extra_vertex_count must be >= 0");
  if (!is_normalized(measure, 1e-6))
    throw Error("perturb: input measure must be normalized");

  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = measure.size();
  const Eigen::Index d = measure.dim();
  const Eigen::Index total = n + cfg.extra_vertex_count;

  // Extra vertices are jittered copies of existing ones so they stay on
  // the shape.
  Eigen::MatrixXd pts(total, d);
  pts.topRows(n) = measure.support;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  for (Eigen::Index e = 0; e < cfg.extra_vertex_count; ++e) {
    const Eigen::Index src = pick(rng);
    Eigen::RowVectorXd jitter(d);
    for (Eigen::Index k = 0; k < d; ++k)
      jitter(k) = cfg.noise_sigma * gauss(rng);
    pts.row(n + e) = measure.support.row(src) + jitter;
  }

  const std::vector<Eigen::Index> perm = random_permutation(total, rng);
  Eigen::MatrixXd shuffled(total, d);
  for (Eigen::Index i = 0; i < total; ++i) shuffled.row(i) = pts.row(perm[i]);

  for (Eigen::Index i = 0; i < total; ++i)
    for (Eigen::Index k = 0; k < d; ++k)
      shuffled(i, k) += cfg.noise_sigma * gauss(rng);

  if (cfg.apply_random_rotation || cfg.apply_random_reflection) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    if (cfg.apply_random_rotation) q = random_orthogonal(d, rng).matrix;
    if (cfg.apply_random_reflection) {
      std::uniform_int_distribution<Eigen::Index> col(0, d - 1);
      q.col(col(rng)) *= -1.0;
    }
    shuffled *= q;
  }

  return normalize(DiscreteMeasure::uniform(std::move(shuffled)));
}

OrthogonalMap random_orthogonal(Eigen::Index d, std::mt19937_64& rng,
                                bool reflect) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(d - 1) *= -1.0;  // proper rotation
  if (reflect) q.col(d - 1) *= -1.0;
  return OrthogonalMap(std::move(q));
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n,
                                             std::mt19937_64& rng) {
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Eigen::Index> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }
  return perm;
}

}  // namespace pw
