#pragma once

#include <cstdint>
#include <vector>

#include "pw/barycenter.hpp"
#include "pw/measure.hpp"

namespace pw {

enum class CloudMetric { PW, EMD, EucGW, GeoGW };

struct ClusteringConfig {
  int k = 2;
  int centroid_size = 30;
  CloudMetric metric = CloudMetric::PW;
  int max_rounds = 20;
  std::uint64_t rng_seed = 0;
  InitStrategy init = InitStrategy::emd_w();  // for PW distance evaluations
  PwStopRule stop{};
  PwStopRule centroid_stop{1e-6, 15};  // barycenter recomputation budget
  int gw_iters = 100;
};

struct ClusteringResult {
  std::vector<int> labels;            // cluster id per input cloud
  std::vector<DiscreteMeasure> centroids;
  std::vector<double> distortion_trace;  // per round, after assignment
  int rounds = 0;
};

/// Squared distance between clouds under the configured metric.
double sq_cloud_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const ClusteringConfig& cfg);

/// Farthest-point seeding: a uniformly random first candidate, then clouds
/// maximizing the minimum PW distance to the chosen ones; each candidate is
/// compressed to centroid_size points by Euclidean k-means.
std::vector<DiscreteMeasure> seed_centroids(
    const std::vector<DiscreteMeasure>& clouds, const ClusteringConfig& cfg);

/// Lloyd-style clustering in the space of point clouds. PW and EMD modes
/// recompute centroids as (PW / plain Wasserstein) barycenters; the GW
/// modes keep medoid centroids.
ClusteringResult pw_kmeans(const std::vector<DiscreteMeasure>& clouds,
                           const ClusteringConfig& cfg);

/// Pair-counting adjusted Rand index between two labelings.
double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b);

/// Mutual information over the arithmetic mean of the label entropies
/// (natural log). Returns 0 when either labeling is constant.
double normalized_mutual_info(const std::vector<int>& labels_a,
                              const std::vector<int>& labels_b);

}  // namespace pw
