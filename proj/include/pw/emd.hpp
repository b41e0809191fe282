#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pw/measure.hpp"

namespace pw {

/// Nonnegative transport costs plus the squared-norm vectors (u, v) of the
/// quadratic expansion c_ij = u_i + v_j - 2 <x_i, y_j P>.
struct CostMatrix {
  Eigen::MatrixXd entries;             // n x m
  Eigen::VectorXd squared_norms_left;  // u, length n
  Eigen::VectorXd squared_norms_right; // v, length m

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

/// Coupling with prescribed marginals. Exact solves return a basic feasible
/// solution: at most n + m - 1 entries above 1e-12.
struct TransportPlan {
  Eigen::MatrixXd coupling;    // n x m, entries >= 0
  Eigen::VectorXd row_marginal;
  Eigen::VectorXd col_marginal;

  /// Largest absolute deviation of the coupling's marginals from the
  /// prescribed ones.
  double marginal_error() const;
};

/// LP dual prices; alpha is normalized to zero weighted mean under p.
struct DualPotentials {
  Eigen::VectorXd alpha;  // length n
  Eigen::VectorXd beta;   // length m
};

struct EmdOptions {
  std::int64_t max_pivots = 0;  // 0 means 50 * (n + m)
  int bland_after_stalls = 100; // degenerate pivots before Bland's rule
};

struct EmdResult {
  TransportPlan plan;
  double cost = 0.0;
  DualPotentials duals;
  std::int64_t pivots = 0;
};

/// Exact transportation problem via network simplex on the dense bipartite
/// graph. Marginals must each sum to 1 within 1e-9; they are rescaled to
/// sum exactly to 1 before solving.
EmdResult solve_emd(const CostMatrix& cost, const Eigen::VectorXd& p,
                    const Eigen::VectorXd& q, const EmdOptions& opts = {});

/// 2-Wasserstein distance between two measures in the same dimension
/// (square root of the optimal squared-Euclidean transport cost).
double wasserstein2(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Squared-Euclidean cost matrix between two supports, with u and v filled.
CostMatrix sq_euclidean_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

}  // namespace pw
