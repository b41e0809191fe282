#pragma once

// Brute-force reference solvers, independent of the library's solution
// paths. They enumerate rather than optimize and are only usable at tiny
// sizes.

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace pwtest {

/// Exact transportation optimum by enumerating every basic feasible
/// solution (spanning trees of the bipartite graph, i.e. polytope
/// vertices). Feasible for n, m <= 4.
inline double brute_force_emd(const Eigen::MatrixXd& cost,
                              const Eigen::VectorXd& p,
                              const Eigen::VectorXd& q) {
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(q.size());
  const int arcs = n * m;
  const int basis = n + m - 1;
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> pick(basis);
  // Enumerate all arc subsets of size n+m-1.
  std::vector<int> idx(basis);
  for (int i = 0; i < basis; ++i) idx[i] = i;
  while (true) {
    // Solve the flow on the chosen arcs by repeatedly peeling degree-1
    // nodes; a subset that fails to peel completely is not a tree.
    std::vector<double> flow(basis, 0.0);
    std::vector<double> supply(n + m);
    for (int i = 0; i < n; ++i) supply[i] = p(i);
    for (int j = 0; j < m; ++j) supply[n + j] = -q(j);
    std::vector<bool> used(basis, false);
    bool ok = true;
    for (int step = 0; step < basis; ++step) {
      int leaf_arc = -1, leaf_node = -1;
      std::vector<int> degree(n + m, 0);
      for (int t = 0; t < basis; ++t) {
        if (used[t]) continue;
        ++degree[idx[t] / m];
        ++degree[n + idx[t] % m];
      }
      for (int node = 0; node < n + m && leaf_arc < 0; ++node) {
        if (degree[node] != 1) continue;
        for (int t = 0; t < basis; ++t) {
          if (used[t]) continue;
          const int src = idx[t] / m, dst = n + idx[t] % m;
          if (src == node || dst == node) {
            leaf_arc = t;
            leaf_node = node;
            break;
          }
        }
      }
      if (leaf_arc < 0) {
        ok = false;  // remaining arcs contain a cycle
        break;
      }
      const int src = idx[leaf_arc] / m, dst = n + idx[leaf_arc] % m;
      const double f = leaf_node == src ? supply[src] : -supply[dst];
      flow[leaf_arc] = f;
      supply[src] -= f;
      supply[dst] += f;
      used[leaf_arc] = true;
    }
    if (ok) {
      bool feasible = true;
      double value = 0.0;
      for (int t = 0; t < basis; ++t) {
        if (flow[t] < -1e-12) feasible = false;
        value += flow[t] * cost(idx[t] / m, idx[t] % m);
      }
      if (feasible) best = std::min(best, value);
    }

    // next combination
    int pos = basis - 1;
    while (pos >= 0 && idx[pos] == arcs - basis + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int t = pos + 1; t < basis; ++t) idx[t] = idx[t - 1] + 1;
  }
  return best;
}

/// Square-loss GW objective of a coupling against distance matrices.
inline double gw_objective(const Eigen::MatrixXd& d1,
                           const Eigen::MatrixXd& d2,
                           const Eigen::MatrixXd& plan) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d1.rows(); ++i)
    for (Eigen::Index j = 0; j < d2.rows(); ++j)
      for (Eigen::Index k = 0; k < d1.rows(); ++k)
        for (Eigen::Index l = 0; l < d2.rows(); ++l) {
          const double diff = d1(i, k) - d2(j, l);
          total += diff * diff * plan(i, j) * plan(k, l);
        }
  return total;
}

/// Best square-loss GW value over all n! permutation couplings (n = m).
inline double brute_force_gw_permutations(const Eigen::MatrixXd& d1,
                                          const Eigen::MatrixXd& d2) {
  const Eigen::Index n = d1.rows();
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) plan(i, perm[i]) = 1.0 / double(n);
    best = std::min(best, gw_objective(d1, d2, plan));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace pwtest
