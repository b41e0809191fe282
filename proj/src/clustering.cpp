#include "pw/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <random>

#include "pw/dense_kmeans.hpp"
#include "pw/errors.hpp"
#include "pw/parallel.hpp"

namespace pw {

namespace {

DiscreteMeasure compress_cloud(const DiscreteMeasure& cloud, int size,
                               std::uint64_t seed) {
  const int k = std::min<int>(size, static_cast<int>(cloud.size()));
  return DiscreteMeasure::uniform(dense_kmeans(cloud.support, k, seed));
}

struct PairKey {
  int cloud;
  int centroid;
  bool operator<(const PairKey& o) const {
    return cloud != o.cloud ? cloud < o.cloud : centroid < o.centroid;
  }
};

// Version-keyed store so distances to unchanged centroids survive across
// rounds. Misses are gathered first, computed in parallel, then inserted
// serially.
class DistanceCache {
 public:
  DistanceCache(const std::vector<DiscreteMeasure>& clouds,
                const ClusteringConfig& cfg)
      : clouds_(clouds), cfg_(cfg) {}

  // Fills dist(i, c) for every cloud/centroid pair.
  void fill(const std::vector<DiscreteMeasure>& centroids,
            const std::vector<int>& versions, Eigen::MatrixXd& dist) {
    const int n = static_cast<int>(clouds_.size());
    const int k = static_cast<int>(centroids.size());
    std::vector<PairKey> todo;
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < n; ++i) {
        auto it = cache_.find(PairKey{i, c});
        if (it != cache_.end() && it->second.first == versions[c])
          dist(i, c) = it->second.second;
        else
          todo.push_back(PairKey{i, c});
      }

    std::vector<double> fresh(todo.size(), 0.0);
    std::exception_ptr failure;
    const auto count = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(dynamic) num_threads(pw::jobs())
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      try {
        fresh[t] = sq_cloud_distance(clouds_[todo[t].cloud],
                                     centroids[todo[t].centroid], cfg_);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t t = 0; t < todo.size(); ++t) {
      cache_[todo[t]] = {versions[todo[t].centroid], fresh[t]};
      dist(todo[t].cloud, todo[t].centroid) = fresh[t];
    }
  }

 private:
  const std::vector<DiscreteMeasure>& clouds_;
  const ClusteringConfig& cfg_;
  std::map<PairKey, std::pair<int, double>> cache_;
};

std::vector<std::size_t> contingency_counts(const std::vector<int>& a,
                                            const std::vector<int>& b,
                                            std::vector<std::size_t>& row,
                                            std::vector<std::size_t>& col) {
  std::map<int, int> amap, bmap;
  for (int v : a)
    if (!amap.count(v)) {
      const int id = static_cast<int>(amap.size());
      amap[v] = id;
    }
  for (int v : b)
    if (!bmap.count(v)) {
      const int id = static_cast<int>(bmap.size());
      bmap[v] = id;
    }
  const std::size_t ra = amap.size(), cb = bmap.size();
  std::vector<std::size_t> table(ra * cb, 0);
  row.assign(ra, 0);
  col.assign(cb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int ai = amap[a[i]], bi = bmap[b[i]];
    ++table[ai * cb + bi];
    ++row[ai];
    ++col[bi];
  }
  return table;
}

double comb2(std::size_t n) { return 0.5 * double(n) * double(n - 1); }

}  // namespace

double sq_cloud_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const ClusteringConfig& cfg) {
  switch (cfg.metric) {
    case CloudMetric::PW:
      return pw_distance(a, b, cfg.init, cfg.stop).cost;
    case CloudMetric::EMD: {
      const double w = wasserstein2(a, b);
      return w * w;
    }
    case CloudMetric::EucGW:
      return solve_gw(a, b, GwMetric::Euclidean, cfg.gw_iters).objective;
    case CloudMetric::GeoGW:
      return solve_gw(a, b, GwMetric::Geodesic, cfg.gw_iters,
                      cfg.init.knn_k).objective;
  }
  throw Error("clustering: unknown metric");
}

std::vector<DiscreteMeasure> seed_centroids(
    const std::vector<DiscreteMeasure>& clouds, const ClusteringConfig& cfg) {
  const int n = static_cast<int>(clouds.size());
  if (cfg.k < 1 || cfg.k > n)
    throw Error("seed_centroids: need 1 <= k <= cloud count");

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<int> first(0, n - 1);
  std::vector<int> candidates{first(rng)};

  // Seeding always measures farness in PW, whatever the clustering metric.
  ClusteringConfig pw_cfg = cfg;
  pw_cfg.metric = CloudMetric::PW;

  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(candidates.size()) < cfg.k) {
    const int latest = candidates.back();
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(pw::jobs())
    for (int i = 0; i < n; ++i) {
      try {
        if (i == latest) {
          min_sq[i] = 0.0;
        } else if (min_sq[i] > 0.0) {
          min_sq[i] = std::min(
              min_sq[i], sq_cloud_distance(clouds[i], clouds[latest], pw_cfg));
        }
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    int next = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::find(candidates.begin(), candidates.end(), i) !=
          candidates.end())
        continue;
      if (min_sq[i] > best) {
        best = min_sq[i];
        next = i;
      }
    }
    candidates.push_back(next);
  }

  std::vector<DiscreteMeasure> centroids;
  centroids.reserve(cfg.k);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    centroids.push_back(compress_cloud(clouds[candidates[c]],
                                       cfg.centroid_size,
                                       cfg.rng_seed + 1 + c));
  return centroids;
}

ClusteringResult pw_kmeans(const std::vector<DiscreteMeasure>& clouds,
                           const ClusteringConfig& cfg) {
  const int n = static_cast<int>(clouds.size());
  if (n == 0) throw Error("pw_kmeans: empty dataset");
  const Eigen::Index d = clouds.front().dim();
  for (const auto& c : clouds)
    if (c.dim() != d)
      throw DimensionMismatch("pw_kmeans: clouds have mixed dimensions");

  ClusteringResult res;
  res.centroids = seed_centroids(clouds, cfg);
  res.labels.assign(n, -1);
  std::vector<int> versions(cfg.k, 0);
  DistanceCache cache(clouds, cfg);

  // GW barycenters live in distance-matrix space; those modes keep medoid
  // centroids instead of free-support barycenters.
  const bool medoid_mode =
      cfg.metric == CloudMetric::EucGW || cfg.metric == CloudMetric::GeoGW;
  std::map<std::pair<int, int>, double> pair_cache;  // cloud-cloud, medoid mode
  auto cloud_pair_sq = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = pair_cache.find(key);
    if (it != pair_cache.end()) return it->second;
    const double d = sq_cloud_distance(clouds[key.first], clouds[key.second], cfg);
    pair_cache[key] = d;
    return d;
  };

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    // Assignment pass.
    std::vector<int> next_labels(n, 0);
    std::vector<double> best_sq(n, 0.0);
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, cfg.k);
    cache.fill(res.centroids, versions, dist);

    double distortion = 0.0;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best = dist(i, 0);
      for (int c = 1; c < cfg.k; ++c)
        if (dist(i, c) < best) {  // ties keep the lowest index
          best = dist(i, c);
          arg = c;
        }
      next_labels[i] = arg;
      best_sq[i] = best;
      distortion += best;
    }
    res.distortion_trace.push_back(distortion);
    res.rounds = round;

    const bool stable = next_labels == res.labels;
    res.labels = next_labels;
    if (stable || round == cfg.max_rounds) break;

    // Update pass.
    for (int c = 0; c < cfg.k; ++c) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (res.labels[i] == c) members.push_back(i);

      if (members.empty()) {
        // Re-seed from the cloud farthest from its current centroid.
        int far = 0;
        for (int i = 1; i < n; ++i)
          if (best_sq[i] > best_sq[far]) far = i;
        res.centroids[c] = compress_cloud(clouds[far], cfg.centroid_size,
                                          cfg.rng_seed + 101 + c);
        ++versions[c];
        continue;
      }

      if (medoid_mode) {
        // Medoid: member minimizing total squared distance to the others.
        int best_m = members.front();
        double best_total = std::numeric_limits<double>::infinity();
        for (int cand : members) {
          double total = 0.0;
          for (int other : members)
            if (other != cand) total += cloud_pair_sq(cand, other);
          if (total < best_total) {
            best_total = total;
            best_m = cand;
          }
        }
        res.centroids[c] = clouds[best_m];
        ++versions[c];
        continue;
      }

      BarycenterProblem problem;
      problem.target_size = cfg.centroid_size;
      for (int i : members) problem.inputs.push_back(clouds[i]);
      if (res.centroids[c].size() == cfg.centroid_size)
        problem.init_support = res.centroids[c].support;  // warm start
      BarycenterOptions opts;
      opts.seed = cfg.rng_seed + 51 + c;
      opts.identity_maps = cfg.metric == CloudMetric::EMD;
      const BarycenterState state =
          solve_barycenter(problem, cfg.init, cfg.centroid_stop, opts);
      res.centroids[c] = state.measure();
      ++versions[c];
    }
  }
  return res;
}

double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw DimensionMismatch("ari: labelings differ in length");
  if (labels_a.empty()) throw Error("ari: empty labelings");
  std::vector<std::size_t> row, col;
  const std::vector<std::size_t> table =
      contingency_counts(labels_a, labels_b, row, col);

  double index = 0.0;
  for (std::size_t v : table) index += comb2(v);
  double sum_row = 0.0, sum_col = 0.0;
  for (std::size_t v : row) sum_row += comb2(v);
  for (std::size_t v : col) sum_col += comb2(v);
  const double total = comb2(labels_a.size());
  const double expected = sum_row * sum_col / total;
  const double max_index = 0.5 * (sum_row + sum_col);
  if (max_index == expected) return 0.0;  // both labelings constant
  return (index - expected) / (max_index - expected);
}

double normalized_mutual_info(const std::vector<int>& labels_a,
                              const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw DimensionMismatch("nmi: labelings differ in length");
  if (labels_a.empty()) throw Error("nmi: empty labelings");
  std::vector<std::size_t> row, col;
  const std::vector<std::size_t> table =
      contingency_counts(labels_a, labels_b, row, col);
  const double total = double(labels_a.size());

  auto entropy = [&](const std::vector<std::size_t>& counts) {
    double h = 0.0;
    for (std::size_t v : counts)
      if (v > 0) {
        const double f = double(v) / total;
        h -= f * std::log(f);
      }
    return h;
  };
  const double ha = entropy(row);
  const double hb = entropy(col);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;  // ZeroEntropy convention

  double info = 0.0;
  const std::size_t cb = col.size();
  for (std::size_t i = 0; i < row.size(); ++i)
    for (std::size_t j = 0; j < cb; ++j) {
      const std::size_t v = table[i * cb + j];
      if (v == 0) continue;
      const double f = double(v) / total;
      info += f * std::log(total * double(v) / (double(row[i]) * col[j]));
    }
  return info / (0.5 * (ha + hb));
}

}  // namespace pw
