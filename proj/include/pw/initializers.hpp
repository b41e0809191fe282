#pragma once

#include <optional>
#include <vector>

#include "pw/emd.hpp"
#include "pw/kernels.hpp"
#include "pw/measure.hpp"

namespace pw {

/// Symmetric k-nearest-neighbor graph over a point cloud; an edge is kept
/// when either endpoint selects the other.
struct NeighborGraph {
  struct Edge {
    int i, j;
    double length;
  };
  int vertex_count = 0;
  int k = 0;
  std::vector<Edge> edges;

  kernels::Csr csr() const;
};

enum class InitKind { EucGW, GeoGW, FiedlerW, UpcaW, EmdW, Provided };

/// Recipe for the initial coupling fed to the alternating solver.
/// EmdW is the plain Wasserstein matching (identity alignment) used by the
/// clustering pipeline on pose-consistent data.
struct InitStrategy {
  InitKind kind = InitKind::FiedlerW;
  int knn_k = 10;     // FiedlerW / GeoGW neighbor count (auto-doubled)
  int gw_iters = 200; // conditional-gradient iteration cap
  std::optional<TransportPlan> provided;

  static InitStrategy euc_gw(int iters = 200);
  static InitStrategy geo_gw(int k = 10, int iters = 200);
  static InitStrategy fiedler_w(int k = 10);
  static InitStrategy upca_w();
  static InitStrategy emd_w();
  static InitStrategy from_plan(TransportPlan plan);
};

NeighborGraph build_knn_graph(const DiscreteMeasure& measure, int k);

/// build_knn_graph with the connectivity fallback: k doubles (capped at
/// n - 1) until the graph is connected.
NeighborGraph build_knn_graph_auto(const DiscreteMeasure& measure, int k);

/// All-pairs shortest-path lengths along graph edges.
Eigen::MatrixXd geodesic_distances(const NeighborGraph& graph);

/// Standardized (zero mean, unit deviation) eigenvector of the unweighted
/// Laplacian for the second-smallest eigenvalue. Throws EigenMultiplicity
/// when the second and third eigenvalues coincide within 1e-9.
Eigen::VectorXd fiedler_vector(const NeighborGraph& graph);

/// 1-D Wasserstein matching between the two Fiedler vectors, evaluated for
/// both orientations of the second one; the cheaper branch wins.
TransportPlan init_fiedler_w(const DiscreteMeasure& a,
                             const DiscreteMeasure& b, int k = 10);

/// PCA axis alignment: the best of the 2^d axis-direction sign choices,
/// each scored by one exact Wasserstein problem.
TransportPlan init_upca_w(const DiscreteMeasure& a, const DiscreteMeasure& b);

enum class GwMetric { Euclidean, Geodesic };

struct GwResult {
  TransportPlan plan;
  double objective = 0.0;  // square-loss GW value of the returned plan
  std::vector<double> objective_trace;
  int iterations = 0;
};

/// Square-loss Gromov-Wasserstein between intra-cloud distance matrices by
/// conditional gradient with exact line search, from the product coupling.
GwResult solve_gw(const DiscreteMeasure& a, const DiscreteMeasure& b,
                  GwMetric metric, int iters = 200, int knn_k = 10);

TransportPlan init_gw(const DiscreteMeasure& a, const DiscreteMeasure& b,
                      GwMetric metric, int iters = 200, int knn_k = 10);

/// Dispatch on the strategy kind; the entry point used by pw_distance.
TransportPlan build_init_plan(const DiscreteMeasure& a,
                              const DiscreteMeasure& b,
                              const InitStrategy& strategy);

/// Exact 1-D transport between sorted value lists (monotone matching).
TransportPlan monotone_matching_1d(const Eigen::VectorXd& f1,
                                   const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& f2,
                                   const Eigen::VectorXd& q, double* cost_out);

}  // namespace pw
