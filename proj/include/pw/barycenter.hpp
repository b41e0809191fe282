#pragma once

#include <optional>
#include <vector>

#include "pw/measure.hpp"
#include "pw/pw_distance.hpp"

namespace pw {

/// Free-support barycenter instance: r input measures, simplex weights
/// over them, and the size of the sought support.
struct BarycenterProblem {
  std::vector<DiscreteMeasure> inputs;
  Eigen::VectorXd lambdas;  // in the r-simplex; empty means uniform
  Eigen::Index target_size = 0;
  std::optional<Eigen::VectorXd> fixed_weights;   // barycenter histogram
  std::optional<Eigen::MatrixXd> init_support;    // X0

  /// Validates and fills defaults (uniform lambdas when empty).
  void canonicalize();
};

struct BarycenterState {
  Eigen::MatrixXd support;   // n x d
  Eigen::VectorXd weights;   // length n
  std::vector<PwSolution> per_input;
  double objective = 0.0;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;

  DiscreteMeasure measure() const {
    return DiscreteMeasure(support, weights);
  }
};

struct BarycenterOptions {
  bool optimize_weights = false;
  double epsilon = 0.0;          // > 0 switches the transport step to Sinkhorn
  bool identity_maps = false;    // plain Wasserstein restriction (P = I)
  double weight_t0 = 1.0;        // Algorithm step-size constant
  int weight_iters = 50;
  std::uint64_t seed = 0;        // X0 subsampling seed
};

/// Newton location step: sum_j lambda_j diag(p)^-1 Gamma_j X_j P_j.
/// Requires the per-input solutions to be current for the present support.
Eigen::MatrixXd location_update(const BarycenterState& state,
                                const BarycenterProblem& problem);

/// Max absolute gap between the analytic gradient of the fixed-plan
/// objective and its central finite difference (step 1e-5).
double gradient_check(const BarycenterState& state,
                      const BarycenterProblem& problem, double step = 1e-5);

/// Same check for the diagonal Hessian 2 diag(p).
double hessian_check(const BarycenterState& state,
                     const BarycenterProblem& problem, double step = 1e-5);

/// Alternating solver: r independent PW alignments, Newton location step,
/// optional weight pass. The objective trace is non-increasing.
BarycenterState solve_barycenter(const BarycenterProblem& problem,
                                 const InitStrategy& init,
                                 const PwStopRule& stop,
                                 const BarycenterOptions& opts = {});

/// Entropic variant (every exact transport solve becomes Sinkhorn).
BarycenterState solve_barycenter_entropic(const BarycenterProblem& problem,
                                          double epsilon,
                                          const InitStrategy& init,
                                          const PwStopRule& stop,
                                          const BarycenterOptions& opts = {});

/// One accelerated mirror-descent pass over the barycenter histogram using
/// the averaged dual potentials; starts from state.weights.
Eigen::VectorXd optimize_weights(const BarycenterState& state,
                                 const BarycenterProblem& problem,
                                 double t0 = 1.0, int iters = 50);

/// Two-measure barycenter path with lambda = (1 - eta, eta), warm-started
/// across ascending eta values.
std::vector<BarycenterState> interpolate(const DiscreteMeasure& a,
                                         const DiscreteMeasure& b,
                                         const std::vector<double>& etas,
                                         Eigen::Index target_size,
                                         const InitStrategy& init,
                                         const PwStopRule& stop,
                                         const BarycenterOptions& opts = {});

}  // namespace pw
