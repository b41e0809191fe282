#include "pw/kernels.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "pw/parallel.hpp"

namespace pw::kernels {

namespace {

inline void sq_dist_row(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        Eigen::MatrixXd& out, Eigen::Index i) {
  const Eigen::Index m = b.rows();
  for (Eigen::Index j = 0; j < m; ++j) {
    out(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
}

inline void softmin_row(const Eigen::MatrixXd& m, double eps,
                        Eigen::VectorXd& out, Eigen::Index i) {
  const double lo = m.row(i).minCoeff();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    acc += std::exp(-(m(i, j) - lo) / eps);
  }
  out(i) = lo - eps * std::log(acc);
}

void dijkstra_row(const Csr& g, int source, Eigen::MatrixXd& dist) {
  const int n = g.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int v = 0; v < n; ++v) dist(source, v) = inf;
  dist(source, source) = 0.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist(source, u)) continue;  // stale entry
    for (int e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      const int v = g.targets[e];
      const double nd = d + g.lengths[e];
      if (nd < dist(source, v)) {
        dist(source, v) = nd;
        heap.emplace(nd, v);
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd pairwise_sq_dists_serial(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) sq_dist_row(a, b, out, i);
  return out;
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static) num_threads(pw::jobs())
  for (Eigen::Index i = 0; i < n; ++i) sq_dist_row(a, b, out, i);
  return out;
}

Eigen::MatrixXd gw_tensor_serial(const Eigen::MatrixXd& d1,
                                 const Eigen::MatrixXd& plan,
                                 const Eigen::MatrixXd& d2) {
  Eigen::MatrixXd tmp(plan.rows(), d2.cols());
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    tmp.row(i) = plan.row(i) * d2;
  Eigen::MatrixXd out(d1.rows(), tmp.cols());
  for (Eigen::Index i = 0; i < d1.rows(); ++i) out.row(i) = d1.row(i) * tmp;
  return out;
}

Eigen::MatrixXd gw_tensor(const Eigen::MatrixXd& d1,
                          const Eigen::MatrixXd& plan,
                          const Eigen::MatrixXd& d2) {
  Eigen::MatrixXd tmp(plan.rows(), d2.cols());
  const Eigen::Index n = plan.rows();
#pragma omp parallel for schedule(static) num_threads(pw::jobs())
  for (Eigen::Index i = 0; i < n; ++i) tmp.row(i) = plan.row(i) * d2;
  Eigen::MatrixXd out(d1.rows(), tmp.cols());
  const Eigen::Index k = d1.rows();
#pragma omp parallel for schedule(static) num_threads(pw::jobs())
  for (Eigen::Index i = 0; i < k; ++i) out.row(i) = d1.row(i) * tmp;
  return out;
}

Eigen::VectorXd softmin_rows_serial(const Eigen::MatrixXd& m, double eps) {
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) softmin_row(m, eps, out, i);
  return out;
}

Eigen::VectorXd softmin_rows(const Eigen::MatrixXd& m, double eps) {
  Eigen::VectorXd out(m.rows());
  const Eigen::Index n = m.rows();
#pragma omp parallel for schedule(static) num_threads(pw::jobs())
  for (Eigen::Index i = 0; i < n; ++i) softmin_row(m, eps, out, i);
  return out;
}

Eigen::MatrixXd dijkstra_all_pairs_serial(const Csr& graph) {
  const int n = graph.size();
  Eigen::MatrixXd dist(n, n);
  for (int s = 0; s < n; ++s) dijkstra_row(graph, s, dist);
  return dist;
}

Eigen::MatrixXd dijkstra_all_pairs(const Csr& graph) {
  const int n = graph.size();
  Eigen::MatrixXd dist(n, n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(pw::jobs())
  for (int s = 0; s < n; ++s) dijkstra_row(graph, s, dist);
  return dist;
}

}  // namespace pw::kernels
