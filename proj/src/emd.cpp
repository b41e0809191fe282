#include "pw/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pw/errors.hpp"
#include "pw/kernels.hpp"

namespace pw {

double TransportPlan::marginal_error() const {
  const double row_err =
      (coupling.rowwise().sum() - row_marginal).cwiseAbs().maxCoeff();
  const double col_err =
      (coupling.colwise().sum().transpose() - col_marginal)
          .cwiseAbs()
          .maxCoeff();
  return std::max(row_err, col_err);
}

namespace {

// Network simplex specialized to the dense bipartite transportation graph.
// Nodes 0..n-1 are sources, n..n+m-1 sinks; arc a = i*m + j runs i -> j.
// The basis is a spanning tree held as parent pointers; potentials satisfy
// alpha_i + beta_j = c_ij on tree arcs.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::MatrixXd& cost, const Eigen::VectorXd& p,
                   const Eigen::VectorXd& q, const EmdOptions& opts)
      : c_(cost),
        p_(p),
        q_(q),
        n_(static_cast<int>(p.size())),
        m_(static_cast<int>(q.size())),
        nodes_(n_ + m_),
        parent_(nodes_, -1),
        parent_arc_(nodes_, -1),
        depth_(nodes_, 0),
        pot_(nodes_, 0.0),
        in_tree_(static_cast<std::size_t>(n_) * m_, false),
        flow_(Eigen::MatrixXd::Zero(n_, m_)),
        opts_(opts) {
    tol_ = 1e-11 * (1.0 + c_.cwiseAbs().maxCoeff());
    block_ = std::max(64, static_cast<int>(std::sqrt(double(n_) * m_)));
  }

  void run() {
    northwest_corner();
    rebuild_tree();

    const std::int64_t cap =
        opts_.max_pivots > 0 ? opts_.max_pivots : std::int64_t(50) * nodes_;
    int stalls = 0;
    while (true) {
      const int entering = stalls >= opts_.bland_after_stalls
                               ? find_entering_bland()
                               : find_entering_block();
      if (entering < 0) break;
      if (++pivots_ > cap)
        throw NonConvergence("solve_emd: pivot cap exceeded (degeneracy?)");
      const double theta = pivot(entering);
      stalls = theta <= 1e-15 ? stalls + 1 : 0;
    }
  }

  const Eigen::MatrixXd& flow() const { return flow_; }
  std::int64_t pivots() const { return pivots_; }

  DualPotentials duals() const {
    DualPotentials d;
    d.alpha = Eigen::Map<const Eigen::VectorXd>(pot_.data(), n_);
    d.beta = Eigen::Map<const Eigen::VectorXd>(pot_.data() + n_, m_);
    return d;
  }

 private:
  int source_of(int arc) const { return arc / m_; }
  int sink_node(int arc) const { return n_ + arc % m_; }
  double arc_cost(int arc) const { return c_(arc / m_, arc % m_); }
  double& arc_flow(int arc) { return flow_(arc / m_, arc % m_); }

  void northwest_corner() {
    Eigen::VectorXd rp = p_;
    Eigen::VectorXd rq = q_;
    int i = 0, j = 0;
    while (true) {
      const double f = std::min(rp(i), rq(j));
      const int arc = i * m_ + j;
      flow_(i, j) = f;
      in_tree_[arc] = true;
      tree_arcs_.push_back(arc);
      rp(i) -= f;
      rq(j) -= f;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (i < n_ - 1 && (rp(i) <= rq(j) || j == m_ - 1))
        ++i;
      else
        ++j;
    }
  }

  // Parent pointers, depths and potentials from scratch, rooted at node 0.
  void rebuild_tree() {
    std::vector<std::vector<std::pair<int, int>>> adj(nodes_);  // (node, arc)
    for (int arc : tree_arcs_) {
      const int s = source_of(arc), t = sink_node(arc);
      adj[s].emplace_back(t, arc);
      adj[t].emplace_back(s, arc);
    }
    std::vector<int> stack{0};
    std::vector<bool> seen(nodes_, false);
    seen[0] = true;
    parent_[0] = -1;
    parent_arc_[0] = -1;
    depth_[0] = 0;
    pot_[0] = 0.0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (auto [v, arc] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        parent_[v] = u;
        parent_arc_[v] = arc;
        depth_[v] = depth_[u] + 1;
        pot_[v] = arc_cost(arc) - pot_[u];
        stack.push_back(v);
      }
    }
  }

  double reduced_cost(int arc) const {
    return arc_cost(arc) - pot_[arc / m_] - pot_[n_ + arc % m_];
  }

  int find_entering_block() {
    const std::int64_t arcs = std::int64_t(n_) * m_;
    std::int64_t scanned = 0;
    while (scanned < arcs) {
      double best = -tol_;
      int best_arc = -1;
      const std::int64_t stop = std::min<std::int64_t>(cursor_ + block_, arcs);
      for (std::int64_t a = cursor_; a < stop; ++a) {
        if (in_tree_[a]) continue;
        const double r = reduced_cost(static_cast<int>(a));
        if (r < best) {
          best = r;
          best_arc = static_cast<int>(a);
        }
      }
      scanned += stop - cursor_;
      cursor_ = stop == arcs ? 0 : stop;
      if (best_arc >= 0) return best_arc;
    }
    return -1;
  }

  int find_entering_bland() {
    const std::int64_t arcs = std::int64_t(n_) * m_;
    for (std::int64_t a = 0; a < arcs; ++a) {
      if (in_tree_[a]) continue;
      if (reduced_cost(static_cast<int>(a)) < -tol_)
        return static_cast<int>(a);
    }
    return -1;
  }

  // One simplex pivot; returns the amount of flow moved around the cycle.
  double pivot(int entering) {
    const int u = source_of(entering);
    const int v = sink_node(entering);

    // Tree paths from both endpoints up to their common ancestor.
    path_u_.clear();
    path_v_.clear();
    int x = u, y = v;
    while (depth_[x] > depth_[y]) {
      path_u_.push_back(x);
      x = parent_[x];
    }
    while (depth_[y] > depth_[x]) {
      path_v_.push_back(y);
      y = parent_[y];
    }
    while (x != y) {
      path_u_.push_back(x);
      x = parent_[x];
      path_v_.push_back(y);
      y = parent_[y];
    }

    // The cycle runs u -> v on the entering arc, climbs v -> LCA through
    // child->parent hops, then descends LCA -> u through parent->child
    // hops. A tree arc's flow decreases when the cycle traverses it
    // against its source->sink direction: on the v side that is when the
    // path child is a sink, on the u side when the path child is a source.
    double theta = std::numeric_limits<double>::infinity();
    int leave_child = -1;
    auto consider = [&](int child, bool decreasing) {
      if (!decreasing) return;
      const double f = arc_flow(parent_arc_[child]);
      if (f < theta) {
        theta = f;
        leave_child = child;
      }
    };
    for (int child : path_u_) consider(child, /*decreasing=*/child < n_);
    for (int child : path_v_) consider(child, /*decreasing=*/child >= n_);
    if (leave_child < 0)
      throw NonConvergence("solve_emd: unbounded pivot (corrupt basis)");

    // Apply the flow change.
    arc_flow(entering) += theta;
    for (int child : path_u_) {
      const bool dec = child < n_;
      arc_flow(parent_arc_[child]) += dec ? -theta : theta;
    }
    for (int child : path_v_) {
      const bool dec = child >= n_;
      arc_flow(parent_arc_[child]) += dec ? -theta : theta;
    }

    // Swap basis arcs and rebuild the tree bookkeeping.
    const int leaving_arc = parent_arc_[leave_child];
    in_tree_[leaving_arc] = false;
    in_tree_[entering] = true;
    std::replace(tree_arcs_.begin(), tree_arcs_.end(), leaving_arc, entering);
    arc_flow(leaving_arc) = 0.0;  // clamp residual fp dust
    rebuild_tree();
    return theta;
  }

  const Eigen::MatrixXd& c_;
  Eigen::VectorXd p_, q_;
  int n_, m_, nodes_;
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> pot_;
  std::vector<bool> in_tree_;
  std::vector<int> tree_arcs_;
  std::vector<int> path_u_, path_v_;
  Eigen::MatrixXd flow_;
  EmdOptions opts_;
  double tol_ = 0.0;
  int block_ = 64;
  std::int64_t cursor_ = 0;
  std::int64_t pivots_ = 0;
};

}  // namespace

EmdResult solve_emd(const CostMatrix& cost, const Eigen::VectorXd& p,
                    const Eigen::VectorXd& q, const EmdOptions& opts) {
  const Eigen::Index n = p.size();
  const Eigen::Index m = q.size();
  if (cost.rows() != n || cost.cols() != m)
    throw DimensionMismatch("solve_emd: cost shape does not match marginals");
  if (!cost.entries.allFinite())
    throw Error("solve_emd: cost entries must be finite");
  for (Eigen::Index i = 0; i < n; ++i)
    if (p(i) < 0.0) throw InfeasibleMarginals("solve_emd: negative weight");
  for (Eigen::Index j = 0; j < m; ++j)
    if (q(j) < 0.0) throw InfeasibleMarginals("solve_emd: negative weight");
  const double sp = p.sum(), sq = q.sum();
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw InfeasibleMarginals("solve_emd: marginals must sum to 1 within 1e-9");

  EmdResult res;
  res.plan.row_marginal = p / sp;
  res.plan.col_marginal = q / sq;

  TransportSimplex simplex(cost.entries, res.plan.row_marginal,
                           res.plan.col_marginal, opts);
  simplex.run();

  res.plan.coupling = simplex.flow();
  res.cost = (cost.entries.array() * res.plan.coupling.array()).sum();
  res.pivots = simplex.pivots();
  res.duals = simplex.duals();
  // The dual has a one-dimensional null direction; pin it by giving alpha
  // zero weighted mean under p.
  const double shift = res.duals.alpha.dot(res.plan.row_marginal);
  res.duals.alpha.array() -= shift;
  res.duals.beta.array() += shift;
  return res;
}

CostMatrix sq_euclidean_cost(const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols())
    throw DimensionMismatch("cost: point dimensions differ");
  CostMatrix c;
  c.entries = kernels::pairwise_sq_dists(x, y);
  c.squared_norms_left = x.rowwise().squaredNorm();
  c.squared_norms_right = y.rowwise().squaredNorm();
  return c;
}

double wasserstein2(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("wasserstein2: dimension mismatch");
  const CostMatrix c = sq_euclidean_cost(a.support, b.support);
  const EmdResult res = solve_emd(c, a.weights, b.weights);
  return std::sqrt(std::max(0.0, res.cost));
}

}  // namespace pw
