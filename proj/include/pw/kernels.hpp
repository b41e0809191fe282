#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pw::kernels {

// Data-parallel inner loops used by the solvers. Each kernel comes in a
// serial reference flavour (suffix _serial) and an OpenMP flavour that
// splits the outer loop across pw::jobs() threads. Both compute every
// output element with the same serial recipe, so they agree bit for bit;
// the serial flavour is kept as the test oracle and benchmark baseline.

/// Squared Euclidean distances between rows of a (n x d) and rows of b (m x d).
Eigen::MatrixXd pairwise_sq_dists_serial(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b);
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b);

/// d1 * plan * d2 with d1 (n x n), plan (n x m), d2 (m x m) symmetric.
Eigen::MatrixXd gw_tensor_serial(const Eigen::MatrixXd& d1,
                                 const Eigen::MatrixXd& plan,
                                 const Eigen::MatrixXd& d2);
Eigen::MatrixXd gw_tensor(const Eigen::MatrixXd& d1,
                          const Eigen::MatrixXd& plan,
                          const Eigen::MatrixXd& d2);

/// Row-wise stabilized soft-minimum: out_i = -eps * log sum_j exp(-m_ij/eps).
Eigen::VectorXd softmin_rows_serial(const Eigen::MatrixXd& m, double eps);
Eigen::VectorXd softmin_rows(const Eigen::MatrixXd& m, double eps);

/// Undirected weighted graph in flat CSR form (both arc directions stored).
struct Csr {
  std::vector<int> offsets;    // size n+1
  std::vector<int> targets;    // size 2*edges
  std::vector<double> lengths; // parallel to targets
  int size() const { return static_cast<int>(offsets.size()) - 1; }
};

/// All-pairs shortest paths by one Dijkstra run per source row.
/// Unreachable pairs come back as +inf.
Eigen::MatrixXd dijkstra_all_pairs_serial(const Csr& graph);
Eigen::MatrixXd dijkstra_all_pairs(const Csr& graph);

}  // namespace pw::kernels
