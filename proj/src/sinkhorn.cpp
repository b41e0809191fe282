#include "pw/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pw/errors.hpp"
#include "pw/kernels.hpp"

namespace pw {

namespace {

constexpr double kLogDomainThreshold = 0.05;

Eigen::VectorXd safe_log(const Eigen::VectorXd& w) {
  Eigen::VectorXd out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    out(i) = w(i) > 0.0 ? std::log(w(i))
                        : -std::numeric_limits<double>::infinity();
  return out;
}

double entropy_term(const Eigen::MatrixXd& plan) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double g = plan(i, j);
      if (g > 0.0) h += g * std::log(g);
    }
  return h;
}

}  // namespace

SinkhornResult sinkhorn(const CostMatrix& cost, const Eigen::VectorXd& p,
                        const Eigen::VectorXd& q, const SinkhornConfig& cfg) {
  if (cfg.epsilon <= 0.0) throw Error("sinkhorn: epsilon must be > 0");
  if (cfg.max_iters < 1) throw Error("sinkhorn: max_iters must be >= 1");
  const Eigen::Index n = p.size();
  const Eigen::Index m = q.size();
  if (cost.rows() != n || cost.cols() != m)
    throw DimensionMismatch("sinkhorn: cost shape does not match marginals");
  const double sp = p.sum(), sq = q.sum();
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw InfeasibleMarginals("sinkhorn: marginals must sum to 1 within 1e-9");
  const Eigen::VectorXd pn = p / sp;
  const Eigen::VectorXd qn = q / sq;

  const double cmax = cost.entries.size() > 0 ? cost.entries.maxCoeff() : 0.0;
  const double scale = cmax > 0.0 ? cmax : 1.0;
  const Eigen::MatrixXd c = cost.entries / scale;
  const double eps = cfg.epsilon / scale;

  SinkhornResult res;
  Eigen::MatrixXd plan(n, m);
  bool converged = false;
  int iter = 0;

  if (eps >= kLogDomainThreshold) {
    // Plain scaling domain.
    const Eigen::MatrixXd k = (-c / eps).array().exp();
    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    for (iter = 1; iter <= cfg.max_iters; ++iter) {
      const Eigen::VectorXd kv = k * v;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (kv(i) <= 0.0 && pn(i) > 0.0)
          throw NumericalUnderflow("sinkhorn: scaling factor vanished");
        u(i) = kv(i) > 0.0 ? pn(i) / kv(i) : 0.0;
      }
      const Eigen::VectorXd ku = k.transpose() * u;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (ku(j) <= 0.0 && qn(j) > 0.0)
          throw NumericalUnderflow("sinkhorn: scaling factor vanished");
        v(j) = ku(j) > 0.0 ? qn(j) / ku(j) : 0.0;
      }
      if (iter % 5 == 0 || iter == cfg.max_iters) {
        plan = u.asDiagonal() * k * v.asDiagonal();
        const double viol = (plan.rowwise().sum() - pn).cwiseAbs().sum() +
                            (plan.colwise().sum().transpose() - qn)
                                .cwiseAbs()
                                .sum();
        if (viol <= cfg.marginal_tol) {
          converged = true;
          break;
        }
      }
    }
  } else {
    // Log-domain potentials; mandatory for small epsilon.
    const Eigen::VectorXd logp = eps * safe_log(pn);
    const Eigen::VectorXd logq = eps * safe_log(qn);
    const Eigen::MatrixXd ct = c.transpose();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    auto fill_plan = [&]() {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
          plan(i, j) = std::exp((f(i) + g(j) - c(i, j)) / eps);
    };
    for (iter = 1; iter <= cfg.max_iters; ++iter) {
      Eigen::MatrixXd shifted = c;
      shifted.rowwise() -= g.transpose();
      f = logp + kernels::softmin_rows(shifted, eps);
      Eigen::MatrixXd shifted_t = ct;
      shifted_t.rowwise() -= f.transpose();
      g = logq + kernels::softmin_rows(shifted_t, eps);
      if (iter % 5 == 0 || iter == cfg.max_iters) {
        fill_plan();
        const double viol = (plan.rowwise().sum() - pn).cwiseAbs().sum() +
                            (plan.colwise().sum().transpose() - qn)
                                .cwiseAbs()
                                .sum();
        if (viol <= cfg.marginal_tol) {
          converged = true;
          break;
        }
      }
    }
  }

  if (!converged)
    throw NonConvergence("sinkhorn: marginal residual above tolerance after " +
                         std::to_string(cfg.max_iters) + " iterations");

  res.plan.coupling = plan;
  res.plan.row_marginal = pn;
  res.plan.col_marginal = qn;
  res.transport_cost = (cost.entries.array() * plan.array()).sum();
  res.regularized_cost = res.transport_cost + cfg.epsilon * entropy_term(plan);
  res.iterations = iter;
  return res;
}

}  // namespace pw
