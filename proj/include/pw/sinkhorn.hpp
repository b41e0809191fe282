#pragma once

#include <Eigen/Dense>

#include "pw/emd.hpp"

namespace pw {

struct SinkhornConfig {
  double epsilon = 0.1;        // regularization strength, > 0
  int max_iters = 200000;
  double marginal_tol = 1e-9;  // L1 violation of the prescribed marginals
};

struct SinkhornResult {
  TransportPlan plan;
  double transport_cost = 0.0;    // <C, plan>
  double regularized_cost = 0.0;  // <C, plan> + eps * sum plan log plan
  int iterations = 0;
};

/// Entropy-regularized transport by Sinkhorn scaling. Costs are normalized
/// by their max entry internally; below a normalized epsilon of 0.05 the
/// iteration runs in the log domain.
SinkhornResult sinkhorn(const CostMatrix& cost, const Eigen::VectorXd& p,
                        const Eigen::VectorXd& q, const SinkhornConfig& cfg);

}  // namespace pw
