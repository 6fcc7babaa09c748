// intentforge/cluster.hpp
//
// Seeded k-means (k-means++ init, Lloyd iterations) and silhouette-based
// selection of k over a range. The assignment step and the silhouette are
// OpenMP-parallel; reductions run in pinned order so results are identical
// for any thread count. Serial reference versions live in reference.hpp.

#ifndef INTENTFORGE_CLUSTER_HPP
#define INTENTFORGE_CLUSTER_HPP

#include <cstdint>
#include <vector>

#include "intentforge/embed.hpp"

namespace intentforge {

struct ClusterModel {
  int k = 0;
  size_t dim = 0;
  std::vector<double> centroids;  // k x dim, row-major
  std::vector<int> assignments;   // n ids in [0, k)
  double silhouette = 0.0;        // 0 when k < 2
  double inertia = 0.0;
  uint64_t seed = 0;
  std::vector<double> inertia_trace;  // per Lloyd iteration, non-increasing
};

// Lloyd's algorithm from a seeded k-means++ start. Stops when assignments
// are stable, the largest centroid move drops below tol, or max_iter is
// reached. Empty clusters are repaired by moving the point farthest from
// its current centroid. Requires 1 <= k <= n.
ClusterModel kmeans(const EmbeddingMatrix& X, int k, uint64_t seed, int max_iter = 100,
                    double tol = 1e-6);

// Mean silhouette s(i) = (b - a) / max(a, b) with Euclidean distances;
// singletons and a = b = 0 contribute 0. Requires k >= 2 and every cluster
// non-empty.
double silhouette_score(const EmbeddingMatrix& X, const std::vector<int>& assignments);

struct KSweepConfig {
  int k_min = 5;
  int k_max = 50;
  uint64_t seed = 0;
  int max_iter = 100;
  double tol = 1e-6;
  int restarts = 1;  // kmeans runs per k, best inertia wins
};

// Runs kmeans for each k in [k_min, min(k_max, n-1)], each with the seed
// mix_seed(cfg.seed, k), and returns the model with the highest silhouette
// (ties prefer smaller k). The sweep over k is parallel; per-k seeds are
// independent so scheduling cannot change the result.
ClusterModel select_k(const EmbeddingMatrix& X, const KSweepConfig& cfg);

}  // namespace intentforge

#endif  // INTENTFORGE_CLUSTER_HPP
