#pragma once

#include <vector>

#include "pw/emd.hpp"
#include "pw/initializers.hpp"
#include "pw/measure.hpp"
#include "pw/sinkhorn.hpp"

namespace pw {

struct PwStopRule {
  double rel_tol = 1e-8;
  int max_iters = 200;
};

/// Converged output of the alternating solver: coupling, orthogonal map,
/// squared value, and the per-iteration objective trace (non-increasing).
struct PwSolution {
  TransportPlan plan;
  OrthogonalMap map;
  double cost = 0.0;      // squared PW value
  double distance = 0.0;  // sqrt(cost)
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Rotation-aware squared-Euclidean cost: entry (i,j) = |x_i - y_j P|^2.
CostMatrix cost_with_map(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const OrthogonalMap& map);

/// Closed-form best orthogonal map for a fixed coupling: U V^T from the
/// SVD of Y^T Gamma^T X.
OrthogonalMap procrustes_step(const DiscreteMeasure& a,
                              const DiscreteMeasure& b,
                              const TransportPlan& plan);

/// Alternate exact transport and Procrustes steps from the given coupling
/// until the objective stalls.
PwSolution pw_align(const DiscreteMeasure& a, const DiscreteMeasure& b,
                    const TransportPlan& init_plan,
                    const PwStopRule& stop = {});

/// Build the initial coupling with the requested strategy, then align.
PwSolution pw_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const InitStrategy& init, const PwStopRule& stop = {});

/// Global PW optimum by enumerating all permutation couplings; only valid
/// for uniform weights and n = m <= 8 (vertices of the uniform polytope
/// are permutations).
PwSolution pw_exact_oracle(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Entropic variant of the alternating solver (Sinkhorn in place of the
/// exact transport step). `solution.cost` keeps the plain transport part;
/// the trace and `regularized_cost` carry the entropy-regularized value.
struct EntropicPwSolution {
  PwSolution solution;
  double regularized_cost = 0.0;
};
EntropicPwSolution pw_align_entropic(const DiscreteMeasure& a,
                                     const DiscreteMeasure& b,
                                     const TransportPlan& init_plan,
                                     double epsilon,
                                     const PwStopRule& stop = {});

}  // namespace pw
