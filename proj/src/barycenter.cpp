#include "pw/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "pw/dense_kmeans.hpp"
#include "pw/errors.hpp"
#include "pw/parallel.hpp"

namespace pw {

namespace {

Eigen::MatrixXd aligned_support(const DiscreteMeasure& input,
                                const OrthogonalMap& map) {
  return input.support * map.matrix;
}

// Fixed-plan objective of the location problem (constants in Y dropped):
// g(X) = sum_j lambda_j (<u(X), p> - 2 <X, Gamma_j Y_j P_j>).
double fixed_plan_objective(const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& p,
                            const Eigen::MatrixXd& pull) {
  return x.rowwise().squaredNorm().dot(p) - 2.0 * (x.array() * pull.array()).sum();
}

// sum_j lambda_j Gamma_j Y_j P_j, the transported-and-rotated pull term.
Eigen::MatrixXd pull_matrix(const BarycenterState& state,
                            const BarycenterProblem& problem) {
  const Eigen::Index n = state.support.rows();
  const Eigen::Index d = state.support.cols();
  Eigen::MatrixXd pull = Eigen::MatrixXd::Zero(n, d);
  for (std::size_t j = 0; j < problem.inputs.size(); ++j) {
    const double lam = problem.lambdas(static_cast<Eigen::Index>(j));
    if (lam == 0.0) continue;
    pull.noalias() += lam * state.per_input[j].plan.coupling *
                      aligned_support(problem.inputs[j],
                                      state.per_input[j].map);
  }
  return pull;
}

Eigen::MatrixXd default_init_support(const BarycenterProblem& problem,
                                     std::uint64_t seed) {
  Eigen::Index pick = 0;
  for (Eigen::Index j = 1; j < problem.lambdas.size(); ++j)
    if (problem.lambdas(j) > problem.lambdas(pick)) pick = j;
  const Eigen::MatrixXd& base = problem.inputs[pick].support;
  if (problem.target_size <= base.rows())
    return dense_kmeans(base, static_cast<int>(problem.target_size), seed);

  // More output points than the donor has: resample with jitter.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.01);
  std::uniform_int_distribution<Eigen::Index> idx(0, base.rows() - 1);
  Eigen::MatrixXd x(problem.target_size, base.cols());
  for (Eigen::Index i = 0; i < problem.target_size; ++i) {
    x.row(i) = base.row(idx(rng));
    for (Eigen::Index c = 0; c < base.cols(); ++c) x(i, c) += gauss(rng);
  }
  return x;
}

// One accelerated mirror-descent sweep at fixed maps; re-solves the r dual
// problems at every inner iterate since the duals depend on p.
Eigen::VectorXd mirror_descent_pass(const std::vector<Eigen::MatrixXd>& costs,
                                    const BarycenterProblem& problem,
                                    const Eigen::VectorXd& p0, double t0,
                                    int iters) {
  const Eigen::Index n = p0.size();
  Eigen::VectorXd p_hat = p0, p_tilde = p0, p = p0;
  for (int t = 1; t <= iters; ++t) {
    const double beta = (t + 1) / 2.0;
    p = (1.0 - 1.0 / beta) * p_hat + (1.0 / beta) * p_tilde;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < costs.size(); ++j) {
      const double lam = problem.lambdas(static_cast<Eigen::Index>(j));
      if (lam == 0.0) continue;
      CostMatrix c;
      c.entries = costs[j];
      EmdResult res = solve_emd(c, p, problem.inputs[j].weights);
      alpha.noalias() += lam * res.duals.alpha;
    }

    // The constant shift cancels in the renormalization; removing the min
    // keeps the exponentials in range.
    alpha.array() -= alpha.minCoeff();
    p_tilde = (p_tilde.array() * (-t0 * beta * alpha.array()).exp()).matrix();
    const double mass = p_tilde.sum();
    if (!std::isfinite(mass) || mass <= 0.0)
      throw NumericalUnderflow("optimize_weights: multiplicative update vanished");
    p_tilde /= mass;
    p_hat = (1.0 - 1.0 / beta) * p_hat + (1.0 / beta) * p_tilde;
  }
  return p;
}

std::vector<Eigen::MatrixXd> rotated_costs(const Eigen::MatrixXd& x,
                                           const BarycenterState& state,
                                           const BarycenterProblem& problem) {
  std::vector<Eigen::MatrixXd> costs(problem.inputs.size());
  for (std::size_t j = 0; j < problem.inputs.size(); ++j)
    costs[j] = kernels::pairwise_sq_dists(
        x, aligned_support(problem.inputs[j], state.per_input[j].map));
  return costs;
}

}  // namespace

void BarycenterProblem::canonicalize() {
  if (inputs.empty()) throw Error("barycenter: need at least one input");
  const Eigen::Index d = inputs.front().dim();
  for (const auto& mu : inputs)
    if (mu.dim() != d)
      throw DimensionMismatch("barycenter: inputs have mixed dimensions");
  const auto r = static_cast<Eigen::Index>(inputs.size());
  if (lambdas.size() == 0)
    lambdas = Eigen::VectorXd::Constant(r, 1.0 / double(r));
  if (lambdas.size() != r)
    throw DimensionMismatch("barycenter: lambda count != input count");
  if (lambdas.minCoeff() < 0.0 || std::abs(lambdas.sum() - 1.0) > 1e-9)
    throw Error("barycenter: lambdas must lie in the simplex");
  lambdas /= lambdas.sum();
  if (target_size < 1) throw Error("barycenter: target_size must be >= 1");
  if (fixed_weights) {
    if (fixed_weights->size() != target_size)
      throw DimensionMismatch("barycenter: fixed_weights length mismatch");
    if (fixed_weights->minCoeff() < 0.0 ||
        std::abs(fixed_weights->sum() - 1.0) > 1e-9)
      throw Error("barycenter: fixed_weights must lie in the simplex");
  }
  if (init_support) {
    if (init_support->rows() != target_size || init_support->cols() != d)
      throw DimensionMismatch("barycenter: init_support shape mismatch");
    if (!init_support->allFinite())
      throw Error("barycenter: init_support must be finite");
  }
}

Eigen::MatrixXd location_update(const BarycenterState& state,
                                const BarycenterProblem& problem) {
  if (state.per_input.size() != problem.inputs.size())
    throw DimensionMismatch("location_update: stale per-input solutions");
  for (Eigen::Index i = 0; i < state.weights.size(); ++i)
    if (state.weights(i) <= 0.0)
      throw ZeroWeight("location_update: zero barycenter weight");
  const Eigen::MatrixXd pull = pull_matrix(state, problem);
  return state.weights.cwiseInverse().asDiagonal() * pull;
}

double gradient_check(const BarycenterState& state,
                      const BarycenterProblem& problem, double step) {
  const Eigen::MatrixXd pull = pull_matrix(state, problem);
  const Eigen::VectorXd& p = state.weights;
  const Eigen::MatrixXd analytic =
      2.0 * p.asDiagonal() * state.support - 2.0 * pull;

  double worst = 0.0;
  Eigen::MatrixXd x = state.support;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double keep = x(i, c);
      x(i, c) = keep + step;
      const double hi = fixed_plan_objective(x, p, pull);
      x(i, c) = keep - step;
      const double lo = fixed_plan_objective(x, p, pull);
      x(i, c) = keep;
      worst = std::max(worst,
                       std::abs((hi - lo) / (2.0 * step) - analytic(i, c)));
    }
  }
  return worst;
}

double hessian_check(const BarycenterState& state,
                     const BarycenterProblem& problem, double step) {
  const Eigen::MatrixXd pull = pull_matrix(state, problem);
  const Eigen::VectorXd& p = state.weights;
  double worst = 0.0;
  Eigen::MatrixXd x = state.support;
  const double mid = fixed_plan_objective(x, p, pull);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double keep = x(i, c);
      x(i, c) = keep + step;
      const double hi = fixed_plan_objective(x, p, pull);
      x(i, c) = keep - step;
      const double lo = fixed_plan_objective(x, p, pull);
      x(i, c) = keep;
      const double second = (hi - 2.0 * mid + lo) / (step * step);
      worst = std::max(worst, std::abs(second - 2.0 * p(i)));
    }
  }
  return worst;
}

Eigen::VectorXd optimize_weights(const BarycenterState& state,
                                 const BarycenterProblem& problem,
                                 double t0, int iters) {
  BarycenterProblem prob = problem;
  prob.canonicalize();
  if (state.per_input.size() != prob.inputs.size())
    throw DimensionMismatch("optimize_weights: stale per-input solutions");
  return mirror_descent_pass(rotated_costs(state.support, state, prob), prob,
                             state.weights, t0, iters);
}

namespace {

BarycenterState run_barycenter(const BarycenterProblem& problem_in,
                               const InitStrategy& init,
                               const PwStopRule& stop,
                               const BarycenterOptions& opts) {
  BarycenterProblem problem = problem_in;
  problem.canonicalize();
  if (stop.max_iters < 1) throw Error("barycenter: max_iters must be >= 1");
  const auto r = problem.inputs.size();

  BarycenterState state;
  state.weights = problem.fixed_weights
                      ? *problem.fixed_weights
                      : Eigen::VectorXd::Constant(
                            problem.target_size,
                            1.0 / double(problem.target_size));
  Eigen::MatrixXd x = problem.init_support
                          ? *problem.init_support
                          : default_init_support(problem, opts.seed);
  state.per_input.resize(r);

  std::vector<std::optional<TransportPlan>> warm(r);
  std::vector<double> values(r, 0.0);
  double prev = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= stop.max_iters; ++iter) {
    state.support = x;
    const DiscreteMeasure bary = state.measure();

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(pw::jobs())
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(r); ++j) {
      try {
        const DiscreteMeasure& input = problem.inputs[j];
        if (opts.identity_maps) {
          const CostMatrix cost =
              sq_euclidean_cost(bary.support, input.support);
          PwSolution sol;
          if (opts.epsilon > 0.0) {
            SinkhornConfig scfg;
            scfg.epsilon = opts.epsilon;
            SinkhornResult sk =
                sinkhorn(cost, bary.weights, input.weights, scfg);
            sol.plan = std::move(sk.plan);
            sol.cost = std::max(0.0, sk.transport_cost);
            values[j] = sk.regularized_cost;
          } else {
            EmdResult res = solve_emd(cost, bary.weights, input.weights);
            sol.plan = std::move(res.plan);
            sol.cost = std::max(0.0, res.cost);
            values[j] = res.cost;
          }
          sol.map = OrthogonalMap::identity(bary.dim());
          sol.distance = std::sqrt(sol.cost);
          sol.objective_trace = {values[j]};
          sol.iterations = 1;
          sol.converged = true;
          state.per_input[j] = std::move(sol);
        } else {
          const TransportPlan plan0 =
              warm[j] ? *warm[j] : build_init_plan(bary, input, init);
          if (opts.epsilon > 0.0) {
            EntropicPwSolution es =
                pw_align_entropic(bary, input, plan0, opts.epsilon, stop);
            values[j] = es.regularized_cost;
            state.per_input[j] = std::move(es.solution);
          } else {
            state.per_input[j] = pw_align(bary, input, plan0, stop);
            values[j] = state.per_input[j].cost;
          }
        }
        warm[j] = state.per_input[j].plan;
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    double objective = 0.0;
    for (std::size_t j = 0; j < r; ++j)
      objective += problem.lambdas(static_cast<Eigen::Index>(j)) * values[j];
    state.objective = objective;
    state.objective_trace.push_back(objective);
    state.iterations = iter;

    if (prev - objective <= stop.rel_tol * (std::abs(prev) + 1e-16)) {
      state.converged = true;
      break;
    }
    prev = objective;
    if (iter == stop.max_iters) break;

    x = location_update(state, problem);

    if (opts.optimize_weights) {
      // Candidate weights from the mirror-descent pass, accepted only when
      // the fixed-map objective at the new support does not get worse;
      // either way the fresh plans double as warm starts.
      const std::vector<Eigen::MatrixXd> costs =
          rotated_costs(x, state, problem);
      const Eigen::VectorXd cand = mirror_descent_pass(
          costs, problem, state.weights, opts.weight_t0, opts.weight_iters);

      auto fixed_map_value = [&](const Eigen::VectorXd& w,
                                 std::vector<TransportPlan>& plans) {
        double total = 0.0;
        plans.resize(r);
        for (std::size_t j = 0; j < r; ++j) {
          CostMatrix c;
          c.entries = costs[j];
          EmdResult res = solve_emd(c, w, problem.inputs[j].weights);
          total += problem.lambdas(static_cast<Eigen::Index>(j)) * res.cost;
          plans[j] = std::move(res.plan);
        }
        return total;
      };
      std::vector<TransportPlan> plans_old, plans_cand;
      const double f_old = fixed_map_value(state.weights, plans_old);
      const double f_cand = fixed_map_value(cand, plans_cand);
      if (f_cand <= f_old) {
        state.weights = cand;
        for (std::size_t j = 0; j < r; ++j) warm[j] = std::move(plans_cand[j]);
      } else {
        for (std::size_t j = 0; j < r; ++j) warm[j] = std::move(plans_old[j]);
      }
    }
  }
  return state;
}

}  // namespace

BarycenterState solve_barycenter(const BarycenterProblem& problem,
                                 const InitStrategy& init,
                                 const PwStopRule& stop,
                                 const BarycenterOptions& opts) {
  BarycenterOptions o = opts;
  o.epsilon = 0.0;
  return run_barycenter(problem, init, stop, o);
}

BarycenterState solve_barycenter_entropic(const BarycenterProblem& problem,
                                          double epsilon,
                                          const InitStrategy& init,
                                          const PwStopRule& stop,
                                          const BarycenterOptions& opts) {
  if (epsilon <= 0.0)
    throw Error("barycenter: entropic variant needs epsilon > 0");
  BarycenterOptions o = opts;
  o.epsilon = epsilon;
  return run_barycenter(problem, init, stop, o);
}

std::vector<BarycenterState> interpolate(const DiscreteMeasure& a,
                                         const DiscreteMeasure& b,
                                         const std::vector<double>& etas,
                                         Eigen::Index target_size,
                                         const InitStrategy& init,
                                         const PwStopRule& stop,
                                         const BarycenterOptions& opts) {
  if (etas.empty()) throw Error("interpolate: need at least one eta");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (etas[i] < 0.0 || etas[i] > 1.0)
      throw Error("interpolate: etas must lie in [0, 1]");
    if (i > 0 && etas[i] < etas[i - 1])
      throw Error("interpolate: etas must be sorted ascending");
  }

  std::vector<BarycenterState> states;
  states.reserve(etas.size());
  std::optional<Eigen::MatrixXd> carry;
  for (double eta : etas) {
    BarycenterProblem problem;
    problem.inputs = {a, b};
    problem.lambdas = Eigen::Vector2d(1.0 - eta, eta);
    problem.target_size = target_size;
    problem.init_support = carry;
    BarycenterState state = run_barycenter(problem, init, stop, opts);
    carry = state.support;  // warm start for the next eta
    states.push_back(std::move(state));
  }
  return states;
}

}  // namespace pw
