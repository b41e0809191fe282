#include "pw/pw_distance.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>

#include "pw/errors.hpp"
#include "pw/kernels.hpp"
#include "pw/parallel.hpp"

namespace pw {

namespace {

void check_same_dim(const DiscreteMeasure& a, const DiscreteMeasure& b,
                    const char* who) {
  if (a.dim() != b.dim())
    throw DimensionMismatch(std::string(who) + ": dimension mismatch");
}

// d x d cross-covariance Y^T Gamma^T X whose SVD yields the optimal map.
Eigen::MatrixXd cross_covariance(const DiscreteMeasure& a,
                                 const DiscreteMeasure& b,
                                 const Eigen::MatrixXd& coupling) {
  return b.support.transpose() * coupling.transpose() * a.support;
}

struct ProcrustesFactors {
  OrthogonalMap map;
  double nuclear_norm;  // trace of the singular values of the cross term
};

ProcrustesFactors procrustes_from_cross(const Eigen::MatrixXd& cross) {
  if (!cross.allFinite())
    throw SvdFailure("procrustes: cross-covariance is not finite");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (log_enabled() && sigma.size() > 0 &&
      sigma(sigma.size() - 1) < 1e-14 * std::max(1.0, sigma(0)))
    std::cerr << "pw: rank-deficient cross-covariance in procrustes step\n";
  ProcrustesFactors out{
      OrthogonalMap(svd.matrixU() * svd.matrixV().transpose()), sigma.sum()};
  return out;
}

void check_init_plan(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const TransportPlan& plan) {
  if (plan.coupling.rows() != a.size() || plan.coupling.cols() != b.size())
    throw DimensionMismatch("pw_align: init plan shape mismatch");
  const double row_err =
      (plan.coupling.rowwise().sum() - a.weights).cwiseAbs().maxCoeff();
  const double col_err = (plan.coupling.colwise().sum().transpose() -
                          b.weights)
                             .cwiseAbs()
                             .maxCoeff();
  if (std::max(row_err, col_err) > 1e-9)
    throw InfeasibleMarginals("pw_align: init plan infeasible for (p, q)");
}

}  // namespace

CostMatrix cost_with_map(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const OrthogonalMap& map) {
  check_same_dim(a, b, "cost_with_map");
  if (map.dim() != a.dim())
    throw DimensionMismatch("cost_with_map: map dimension mismatch");
  const Eigen::MatrixXd rotated = b.support * map.matrix;
  CostMatrix c;
  c.entries = kernels::pairwise_sq_dists(a.support, rotated);
  c.squared_norms_left = a.support.rowwise().squaredNorm();
  c.squared_norms_right = b.support.rowwise().squaredNorm();
  return c;
}

OrthogonalMap procrustes_step(const DiscreteMeasure& a,
                              const DiscreteMeasure& b,
                              const TransportPlan& plan) {
  check_same_dim(a, b, "procrustes_step");
  if (plan.coupling.rows() != a.size() || plan.coupling.cols() != b.size())
    throw DimensionMismatch("procrustes_step: plan shape mismatch");
  return procrustes_from_cross(cross_covariance(a, b, plan.coupling)).map;
}

PwSolution pw_align(const DiscreteMeasure& a, const DiscreteMeasure& b,
                    const TransportPlan& init_plan, const PwStopRule& stop) {
  check_same_dim(a, b, "pw_align");
  check_init_plan(a, b, init_plan);
  if (stop.rel_tol <= 0.0) throw Error("pw_align: rel_tol must be > 0");
  if (stop.max_iters < 1) throw Error("pw_align: max_iters must be >= 1");

  PwSolution sol;
  OrthogonalMap p = procrustes_step(a, b, init_plan);
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    const CostMatrix cost = cost_with_map(a, b, p);
    EmdResult emd = solve_emd(cost, a.weights, b.weights);
    const ProcrustesFactors next =
        procrustes_from_cross(cross_covariance(a, b, emd.plan.coupling));
    // Objective after the full alternation, evaluated against the refreshed
    // map directly (the quadratic expansion <u,p> + <v,q> - 2 tr Sigma
    // cancels catastrophically near zero).
    const double value =
        (cost_with_map(a, b, next.map).entries.array() *
         emd.plan.coupling.array())
            .sum();
    sol.objective_trace.push_back(value);
    sol.plan = std::move(emd.plan);
    p = next.map;
    sol.iterations = iter;
    if (prev - value <= stop.rel_tol * (std::abs(prev) + 1e-16)) {
      sol.converged = true;
      break;
    }
    prev = value;
  }
  sol.map = p;
  sol.cost = std::max(0.0, sol.objective_trace.back());
  sol.distance = std::sqrt(sol.cost);
  return sol;
}

PwSolution pw_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const InitStrategy& init, const PwStopRule& stop) {
  check_same_dim(a, b, "pw_distance");
  return pw_align(a, b, build_init_plan(a, b, init), stop);
}

PwSolution pw_exact_oracle(const DiscreteMeasure& a,
                           const DiscreteMeasure& b) {
  check_same_dim(a, b, "pw_exact_oracle");
  const Eigen::Index n = a.size();
  if (b.size() != n)
    throw TooLarge("pw_exact_oracle: supports must have equal size");
  if (n > 8) throw TooLarge("pw_exact_oracle: n must be <= 8");
  const double w = 1.0 / double(n);
  if ((a.weights.array() - w).abs().maxCoeff() > 1e-12 ||
      (b.weights.array() - w).abs().maxCoeff() > 1e-12)
    throw TooLarge("pw_exact_oracle: weights must be uniform");

  // For uniform equal-size marginals the optimal vertex is a permutation,
  // so scanning all of them yields the global optimum.
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Eigen::Index> best_perm = perm;
  double best_nuclear = -std::numeric_limits<double>::infinity();
  const Eigen::Index d = a.dim();
  do {
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i)
      cross.noalias() +=
          w * b.support.row(perm[i]).transpose() * a.support.row(i);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
    const double nuclear = svd.singularValues().sum();
    if (nuclear > best_nuclear) {
      best_nuclear = nuclear;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  PwSolution sol;
  sol.plan.coupling = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) sol.plan.coupling(i, best_perm[i]) = w;
  sol.plan.row_marginal = a.weights;
  sol.plan.col_marginal = b.weights;
  sol.map = procrustes_from_cross(cross_covariance(a, b, sol.plan.coupling))
                .map;
  sol.cost = std::max(
      0.0, (cost_with_map(a, b, sol.map).entries.array() *
            sol.plan.coupling.array())
               .sum());
  sol.distance = std::sqrt(sol.cost);
  sol.objective_trace = {sol.cost};
  sol.iterations = 1;
  sol.converged = true;
  return sol;
}

EntropicPwSolution pw_align_entropic(const DiscreteMeasure& a,
                                     const DiscreteMeasure& b,
                                     const TransportPlan& init_plan,
                                     double epsilon, const PwStopRule& stop) {
  check_same_dim(a, b, "pw_align_entropic");
  check_init_plan(a, b, init_plan);
  if (epsilon <= 0.0) throw Error("pw_align_entropic: epsilon must be > 0");

  SinkhornConfig scfg;
  scfg.epsilon = epsilon;

  EntropicPwSolution out;
  PwSolution& sol = out.solution;
  OrthogonalMap p = procrustes_step(a, b, init_plan);
  double prev = std::numeric_limits<double>::infinity();
  double transport = 0.0;
  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    const CostMatrix cost = cost_with_map(a, b, p);
    SinkhornResult sk = sinkhorn(cost, a.weights, b.weights, scfg);
    const double entropy = sk.regularized_cost - sk.transport_cost;
    const ProcrustesFactors next =
        procrustes_from_cross(cross_covariance(a, b, sk.plan.coupling));
    transport = (cost_with_map(a, b, next.map).entries.array() *
                 sk.plan.coupling.array())
                    .sum();
    const double value = transport + entropy;
    sol.objective_trace.push_back(value);
    sol.plan = std::move(sk.plan);
    p = next.map;
    sol.iterations = iter;
    if (prev - value <= stop.rel_tol * (std::abs(prev) + 1e-16)) {
      sol.converged = true;
      break;
    }
    prev = value;
  }
  sol.map = p;
  sol.cost = std::max(0.0, transport);
  sol.distance = std::sqrt(sol.cost);
  out.regularized_cost = sol.objective_trace.back();
  return out;
}

}  // namespace pw
