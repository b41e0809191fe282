#include "pw/initializers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pw/errors.hpp"
#include "pw/parallel.hpp"

namespace pw {

namespace {

constexpr double kEigenGapTol = 1e-9;

bool graph_connected(const kernels::Csr& g) {
  const int n = g.size();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      const int v = g.targets[e];
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

// Deterministic sign: first clearly nonzero component made positive.
void fix_sign(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

// Fiedler pair (lambda2, lambda3 and the lambda2 eigenvector) of the
// unweighted Laplacian. Dense up to 2000 vertices, block inverse
// iteration above.
void fiedler_pair(const NeighborGraph& graph, double& lambda2,
                  double& lambda3, Eigen::VectorXd& vec) {
  const int n = graph.vertex_count;
  if (n <= 2000) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : graph.edges) {
      lap(e.i, e.j) -= 1.0;
      lap(e.j, e.i) -= 1.0;
      lap(e.i, e.i) += 1.0;
      lap(e.j, e.j) += 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    if (es.info() != Eigen::Success)
      throw SvdFailure("fiedler: dense eigen decomposition failed");
    lambda2 = es.eigenvalues()(1);
    lambda3 = n > 2 ? es.eigenvalues()(2)
                    : std::numeric_limits<double>::infinity();
    vec = es.eigenvectors().col(1);
    return;
  }

  // Shifted inverse iteration on a 2-column block, deflating the constant
  // null vector.
  Eigen::SparseMatrix<double> lap(n, n);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(graph.edges.size() * 4);
    for (const auto& e : graph.edges) {
      trip.emplace_back(e.i, e.j, -1.0);
      trip.emplace_back(e.j, e.i, -1.0);
      trip.emplace_back(e.i, e.i, 1.0);
      trip.emplace_back(e.j, e.j, 1.0);
    }
    lap.setFromTriplets(trip.begin(), trip.end());
  }
  Eigen::SparseMatrix<double> shifted = lap;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-8;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success)
    throw SvdFailure("fiedler: sparse factorization failed");

  Eigen::MatrixXd block(n, 2);
  for (int i = 0; i < n; ++i) {
    block(i, 0) = std::cos(2.0 * M_PI * i / n);
    block(i, 1) = std::sin(4.0 * M_PI * (i + 0.25) / n);
  }
  Eigen::Vector2d ritz = Eigen::Vector2d::Zero();
  for (int sweep = 0; sweep < 200; ++sweep) {
    block = solver.solve(block);
    for (int c = 0; c < 2; ++c) {
      block.col(c).array() -= block.col(c).mean();  // deflate constants
      for (int prev = 0; prev < c; ++prev)
        block.col(c) -= block.col(prev).dot(block.col(c)) * block.col(prev);
      block.col(c).normalize();
    }
    Eigen::Matrix2d small = block.transpose() * (lap * block);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(small);
    block = block * es.eigenvectors();
    const Eigen::Vector2d next = es.eigenvalues();
    const double resid = (lap * block.col(0) - next(0) * block.col(0)).norm();
    const bool settled = (next - ritz).cwiseAbs().maxCoeff() < 1e-13;
    ritz = next;
    if (settled && resid < 1e-10) break;
  }
  lambda2 = ritz(0);
  lambda3 = ritz(1);
  vec = block.col(0);
}

}  // namespace

kernels::Csr NeighborGraph::csr() const {
  kernels::Csr g;
  g.offsets.assign(vertex_count + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets[e.i + 1];
    ++g.offsets[e.j + 1];
  }
  for (int i = 0; i < vertex_count; ++i) g.offsets[i + 1] += g.offsets[i];
  g.targets.resize(edges.size() * 2);
  g.lengths.resize(edges.size() * 2);
  std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& e : edges) {
    g.targets[cursor[e.i]] = e.j;
    g.lengths[cursor[e.i]++] = e.length;
    g.targets[cursor[e.j]] = e.i;
    g.lengths[cursor[e.j]++] = e.length;
  }
  return g;
}

InitStrategy InitStrategy::euc_gw(int iters) {
  return {InitKind::EucGW, 10, iters, std::nullopt};
}
InitStrategy InitStrategy::geo_gw(int k, int iters) {
  return {InitKind::GeoGW, k, iters, std::nullopt};
}
InitStrategy InitStrategy::fiedler_w(int k) {
  return {InitKind::FiedlerW, k, 200, std::nullopt};
}
InitStrategy InitStrategy::upca_w() {
  return {InitKind::UpcaW, 10, 200, std::nullopt};
}
InitStrategy InitStrategy::emd_w() {
  return {InitKind::EmdW, 10, 200, std::nullopt};
}
InitStrategy InitStrategy::from_plan(TransportPlan plan) {
  InitStrategy s;
  s.kind = InitKind::Provided;
  s.provided = std::move(plan);
  return s;
}

NeighborGraph build_knn_graph(const DiscreteMeasure& measure, int k) {
  const int n = static_cast<int>(measure.size());
  if (k < 1 || k >= n)
    throw Error("knn: need 1 <= k < n");
  const Eigen::MatrixXd d2 =
      kernels::pairwise_sq_dists(measure.support, measure.support);

  std::vector<std::pair<int, int>> pairs;  // (min,max) vertex ids
  pairs.reserve(static_cast<std::size_t>(n) * k);
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) order[j] = {d2(i, j), j};
    order[i].first = std::numeric_limits<double>::infinity();  // no self loop
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    for (int t = 0; t < k; ++t) {
      const int j = order[t].second;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  NeighborGraph g;
  g.vertex_count = n;
  g.k = k;
  g.edges.reserve(pairs.size());
  for (auto [i, j] : pairs)
    g.edges.push_back({i, j, std::max(std::sqrt(d2(i, j)), 1e-15)});
  if (!graph_connected(g.csr()))
    throw Disconnected("knn: graph is not connected (raise k)");
  return g;
}

NeighborGraph build_knn_graph_auto(const DiscreteMeasure& measure, int k) {
  const int n = static_cast<int>(measure.size());
  int cur = std::min(std::max(k, 1), n - 1);
  while (true) {
    try {
      return build_knn_graph(measure, cur);
    } catch (const Disconnected&) {
      if (cur >= n - 1) throw;
      cur = std::min(cur * 2, n - 1);
    }
  }
}

Eigen::MatrixXd geodesic_distances(const NeighborGraph& graph) {
  const Eigen::MatrixXd dist = kernels::dijkstra_all_pairs(graph.csr());
  if (!dist.allFinite())
    throw Disconnected("geodesics: graph is not connected");
  return dist;
}

Eigen::VectorXd fiedler_vector(const NeighborGraph& graph) {
  if (!graph_connected(graph.csr()))
    throw Disconnected("fiedler: graph is not connected");
  double lambda2 = 0.0, lambda3 = 0.0;
  Eigen::VectorXd vec;
  fiedler_pair(graph, lambda2, lambda3, vec);
  if (lambda3 - lambda2 < kEigenGapTol)
    throw EigenMultiplicity(
        "fiedler: second and third eigenvalues coincide; direction "
        "ill-defined");
  fix_sign(vec);
  const double mean = vec.mean();
  vec.array() -= mean;
  const double sd = std::sqrt(vec.squaredNorm() / double(vec.size()));
  if (sd <= 0.0) throw EigenMultiplicity("fiedler: constant eigenvector");
  return vec / sd;
}

TransportPlan monotone_matching_1d(const Eigen::VectorXd& f1,
                                   const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& f2,
                                   const Eigen::VectorXd& q,
                                   double* cost_out) {
  const Eigen::Index n = f1.size();
  const Eigen::Index m = f2.size();
  std::vector<Eigen::Index> oi(n), oj(m);
  std::iota(oi.begin(), oi.end(), 0);
  std::iota(oj.begin(), oj.end(), 0);
  std::stable_sort(oi.begin(), oi.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return f1(a) < f1(b); });
  std::stable_sort(oj.begin(), oj.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return f2(a) < f2(b); });

  TransportPlan plan;
  plan.coupling = Eigen::MatrixXd::Zero(n, m);
  plan.row_marginal = p;
  plan.col_marginal = q;
  double cost = 0.0;
  Eigen::Index a = 0, b = 0;
  double rem_p = p(oi[0]), rem_q = q(oj[0]);
  while (true) {
    const double mass = std::min(rem_p, rem_q);
    const Eigen::Index i = oi[a], j = oj[b];
    plan.coupling(i, j) += mass;
    const double diff = f1(i) - f2(j);
    cost += mass * diff * diff;
    rem_p -= mass;
    rem_q -= mass;
    if (rem_p <= rem_q) {
      if (++a >= n) break;
      rem_p = p(oi[a]);
      if (rem_q <= 0.0 && b + 1 < m) rem_q = q(oj[++b]);
    } else {
      if (++b >= m) break;
      rem_q = q(oj[b]);
    }
  }
  if (cost_out) *cost_out = cost;
  return plan;
}

TransportPlan init_fiedler_w(const DiscreteMeasure& a,
                             const DiscreteMeasure& b, int k) {
  const Eigen::VectorXd f1 = fiedler_vector(build_knn_graph_auto(a, k));
  const Eigen::VectorXd f2 = fiedler_vector(build_knn_graph_auto(b, k));
  double cost_pos = 0.0, cost_neg = 0.0;
  TransportPlan pos = monotone_matching_1d(f1, a.weights, f2, b.weights,
                                           &cost_pos);
  TransportPlan neg = monotone_matching_1d(f1, a.weights, (-f2).eval(),
                                           b.weights, &cost_neg);
  return cost_pos <= cost_neg ? pos : neg;
}

TransportPlan init_upca_w(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const Eigen::Index d = a.dim();
  if (b.dim() != d) throw DimensionMismatch("upca: dimension mismatch");

  auto principal_axes = [](const DiscreteMeasure& mu) {
    Eigen::MatrixXd centered = mu.support;
    centered.rowwise() -= mu.support.colwise().mean();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / double(mu.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
      throw SvdFailure("upca: eigen decomposition failed");
    const Eigen::VectorXd evals = es.eigenvalues();  // ascending
    for (Eigen::Index i = 0; i + 1 < evals.size(); ++i)
      if (evals(i + 1) - evals(i) < 1e-9)
        throw DegenerateCovariance("upca: covariance eigenvalues coincide");
    Eigen::MatrixXd axes(evals.size(), evals.size());
    for (Eigen::Index c = 0; c < evals.size(); ++c) {
      Eigen::VectorXd col = es.eigenvectors().col(evals.size() - 1 - c);
      fix_sign(col);
      axes.col(c) = col;
    }
    return axes;  // columns sorted by descending eigenvalue
  };

  const Eigen::MatrixXd qx = principal_axes(a);
  const Eigen::MatrixXd qy = principal_axes(b);

  const int combos = 1 << d;
  double best_cost = std::numeric_limits<double>::infinity();
  TransportPlan best;
  for (int s = 0; s < combos; ++s) {
    Eigen::VectorXd signs(d);
    for (Eigen::Index bit = 0; bit < d; ++bit)
      signs(bit) = (s >> bit) & 1 ? -1.0 : 1.0;
    const Eigen::MatrixXd rotated =
        b.support * qy * signs.asDiagonal() * qx.transpose();
    const CostMatrix cost = sq_euclidean_cost(a.support, rotated);
    EmdResult res = solve_emd(cost, a.weights, b.weights);
    if (res.cost < best_cost) {
      best_cost = res.cost;
      best = std::move(res.plan);
    }
  }
  return best;
}

GwResult solve_gw(const DiscreteMeasure& a, const DiscreteMeasure& b,
                  GwMetric metric, int iters, int knn_k) {
  if (a.dim() != b.dim()) throw DimensionMismatch("gw: dimension mismatch");
  if (iters < 1) throw Error("gw: iters must be >= 1");

  Eigen::MatrixXd d1, d2;
  if (metric == GwMetric::Euclidean) {
    d1 = kernels::pairwise_sq_dists(a.support, a.support).cwiseSqrt();
    d2 = kernels::pairwise_sq_dists(b.support, b.support).cwiseSqrt();
  } else {
    d1 = geodesic_distances(build_knn_graph_auto(a, knn_k));
    d2 = geodesic_distances(build_knn_graph_auto(b, knn_k));
  }
  const Eigen::VectorXd& p = a.weights;
  const Eigen::VectorXd& q = b.weights;

  // Square-loss objective on the feasible polytope:
  //   E(G) = const(p,q) - 2 <d1 G d2, G>.
  const double constant = p.dot(d1.array().square().matrix() * p) +
                          q.dot(d2.array().square().matrix() * q);

  Eigen::MatrixXd plan = p * q.transpose();
  Eigen::MatrixXd cross = kernels::gw_tensor(d1, plan, d2);
  double objective = constant - 2.0 * (cross.array() * plan.array()).sum();

  GwResult res;
  res.objective_trace.push_back(objective);

  for (int it = 1; it <= iters; ++it) {
    // Linearize, solve the transport problem on the (shifted) gradient.
    Eigen::MatrixXd grad = -4.0 * cross;
    grad.array() -= grad.minCoeff();
    CostMatrix lin;
    lin.entries = std::move(grad);
    const EmdResult lp = solve_emd(lin, p, q);

    const Eigen::MatrixXd delta = lp.plan.coupling - plan;
    const double descent = (cross.array() * delta.array()).sum();
    if (descent <= 1e-15) break;  // stationary
    const Eigen::MatrixXd cross_delta = kernels::gw_tensor(d1, delta, d2);
    const double curvature = (cross_delta.array() * delta.array()).sum();
    double step = 1.0;
    if (curvature < 0.0)
      step = std::clamp(-descent / curvature, 0.0, 1.0);

    plan += step * delta;
    cross += step * cross_delta;
    const double next = constant - 2.0 * (cross.array() * plan.array()).sum();
    res.objective_trace.push_back(next);
    res.iterations = it;
    const double drop = objective - next;
    objective = next;
    if (drop <= 1e-8 * (std::abs(objective) + 1e-16)) break;
  }

  res.plan.coupling = std::move(plan);
  res.plan.row_marginal = p;
  res.plan.col_marginal = q;
  res.objective = objective;
  return res;
}

TransportPlan init_gw(const DiscreteMeasure& a, const DiscreteMeasure& b,
                      GwMetric metric, int iters, int knn_k) {
  return solve_gw(a, b, metric, iters, knn_k).plan;
}

TransportPlan build_init_plan(const DiscreteMeasure& a,
                              const DiscreteMeasure& b,
                              const InitStrategy& strategy) {
  switch (strategy.kind) {
    case InitKind::EucGW:
      return init_gw(a, b, GwMetric::Euclidean, strategy.gw_iters);
    case InitKind::GeoGW:
      return init_gw(a, b, GwMetric::Geodesic, strategy.gw_iters,
                     strategy.knn_k);
    case InitKind::FiedlerW:
      return init_fiedler_w(a, b, strategy.knn_k);
    case InitKind::UpcaW:
      return init_upca_w(a, b);
    case InitKind::EmdW: {
      const CostMatrix cost = sq_euclidean_cost(a.support, b.support);
      return solve_emd(cost, a.weights, b.weights).plan;
    }
    case InitKind::Provided: {
      if (!strategy.provided)
        throw Error("init: Provided strategy carries no plan");
      const TransportPlan& plan = *strategy.provided;
      if (plan.coupling.rows() != a.size() || plan.coupling.cols() != b.size())
        throw DimensionMismatch("init: provided plan shape mismatch");
      if ((plan.coupling.rowwise().sum() - a.weights).cwiseAbs().maxCoeff() >
              1e-9 ||
          (plan.coupling.colwise().sum().transpose() - b.weights)
                  .cwiseAbs()
                  .maxCoeff() > 1e-9)
        throw InfeasibleMarginals("init: provided plan marginals mismatch");
      return plan;
    }
  }
  throw Error("init: unknown strategy");
}

}  // namespace pw
