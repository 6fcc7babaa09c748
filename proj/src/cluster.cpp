// src/cluster.cpp

#include "intentforge/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "intentforge/error.hpp"
#include "intentforge/rng.hpp"

namespace intentforge {

namespace {

double dist_sq(std::span<const double> a, const double* b) {
  double acc = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return acc;
}

// Nearest centroid, ties to the smaller index.
int nearest(std::span<const double> x, const std::vector<double>& centroids, int k, size_t dim,
            double* out_d2 = nullptr) {
  int best = 0;
  double best_d2 = dist_sq(x, centroids.data());
  for (int c = 1; c < k; ++c) {
    double d2 = dist_sq(x, centroids.data() + static_cast<size_t>(c) * dim);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  if (out_d2) *out_d2 = best_d2;
  return best;
}

// Seeded greedy k-means++: each new centroid is D^2-sampled from several
// candidates and the one that shrinks the potential most wins. Candidate
// draws happen in a fixed order, so the init is a pure function of
// (X, k, rng state).
std::vector<double> kmeanspp_init(const EmbeddingMatrix& X, int k, Rng& rng) {
  const size_t n = X.n, dim = X.dim;
  std::vector<double> centroids(static_cast<size_t>(k) * dim, 0.0);
  size_t first = static_cast<size_t>(rng.uniform_below(n));
  std::copy(X.row(first).begin(), X.row(first).end(), centroids.begin());

  const int n_candidates = 2 + static_cast<int>(std::log(static_cast<double>(k)));

  // d2[i] tracks the distance to the nearest chosen centroid
  std::vector<double> d2(n, 0.0);
  for (size_t i = 0; i < n; ++i) d2[i] = dist_sq(X.row(i), centroids.data());

  std::vector<double> cand_d2(n, 0.0);
  for (int chosen = 1; chosen < k; ++chosen) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += d2[i];

    size_t best_pick = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    std::vector<double> best_d2;
    for (int c = 0; c < n_candidates; ++c) {
      size_t pick;
      if (total <= 0.0) {
        pick = static_cast<size_t>(rng.uniform_below(n));
      } else {
        double r = rng.uniform() * total;
        double cum = 0.0;
        pick = n - 1;
        for (size_t i = 0; i < n; ++i) {
          cum += d2[i];
          if (r < cum) {
            pick = i;
            break;
          }
        }
      }
      double potential = 0.0;
      auto cand = X.row(pick);
      for (size_t i = 0; i < n; ++i) {
        cand_d2[i] = std::min(d2[i], dist_sq(X.row(i), cand.data()));
        potential += cand_d2[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best_pick = pick;
        best_d2 = cand_d2;
      }
    }
    std::copy(X.row(best_pick).begin(), X.row(best_pick).end(),
              centroids.begin() + static_cast<size_t>(chosen) * dim);
    d2.swap(best_d2);
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans(const EmbeddingMatrix& X, int k, uint64_t seed, int max_iter, double tol) {
  const size_t n = X.n, dim = X.dim;
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (static_cast<size_t>(k) > n)
    throw ValidationError("kmeans: k = " + std::to_string(k) + " exceeds n = " +
                          std::to_string(n));
  for (double v : X.data)
    if (!std::isfinite(v)) throw ValidationError("kmeans: non-finite input");

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.dim = dim;
  model.seed = seed;
  model.centroids = kmeanspp_init(X, k, rng);
  model.assignments.assign(n, -1);

  std::vector<int> counts(k, 0);
  std::vector<double> point_d2(n, 0.0);
  const int64_t ni = static_cast<int64_t>(n);

  for (int iter = 0; iter < max_iter; ++iter) {
    // assignment step: independent per point
    bool changed = false;
#pragma omp parallel for schedule(static) reduction(|| : changed)
    for (int64_t i = 0; i < ni; ++i) {
      int a = nearest(X.row(i), model.centroids, k, dim, &point_d2[i]);
      if (a != model.assignments[i]) changed = true;
      model.assignments[i] = a;
    }

    std::fill(counts.begin(), counts.end(), 0);
    for (size_t i = 0; i < n; ++i) ++counts[model.assignments[i]];

    // repair empty clusters with the point farthest from its centroid
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      size_t worst = n;
      double worst_d2 = -1.0;
      for (size_t i = 0; i < n; ++i) {
        if (counts[model.assignments[i]] <= 1) continue;  // keep donors non-empty
        if (point_d2[i] > worst_d2) {
          worst_d2 = point_d2[i];
          worst = i;
        }
      }
      if (worst == n) throw Error("kmeans: unable to repair empty cluster");
      --counts[model.assignments[worst]];
      model.assignments[worst] = c;
      counts[c] = 1;
      point_d2[worst] = 0.0;
      changed = true;
    }

    // update step: one cluster per thread, members summed in index order
    std::vector<double> next(model.centroids.size(), 0.0);
    const int64_t kc = k;
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < kc; ++c) {
      double* row = next.data() + static_cast<size_t>(c) * dim;
      for (size_t i = 0; i < n; ++i) {
        if (model.assignments[i] != static_cast<int>(c)) continue;
        auto x = X.row(i);
        for (size_t d = 0; d < dim; ++d) row[d] += x[d];
      }
      for (size_t d = 0; d < dim; ++d) row[d] /= counts[c];
    }

    double max_move_sq = 0.0;
    for (int c = 0; c < k; ++c) {
      double move = dist_sq({next.data() + static_cast<size_t>(c) * dim, dim},
                            model.centroids.data() + static_cast<size_t>(c) * dim);
      max_move_sq = std::max(max_move_sq, move);
    }
    model.centroids.swap(next);

    double inertia = 0.0;
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < ni; ++i)
      point_d2[i] = dist_sq(X.row(i), model.centroids.data() +
                                          static_cast<size_t>(model.assignments[i]) * dim);
    for (size_t i = 0; i < n; ++i) inertia += point_d2[i];
    model.inertia_trace.push_back(inertia);
    model.inertia = inertia;

    if (!changed || max_move_sq < tol * tol) break;
  }

  model.silhouette = (k >= 2) ? silhouette_score(X, model.assignments) : 0.0;
  return model;
}

double silhouette_score(const EmbeddingMatrix& X, const std::vector<int>& assignments) {
  const size_t n = X.n, dim = X.dim;
  if (assignments.size() != n)
    throw ValidationError("silhouette: assignments length does not match matrix");
  if (n == 0) throw ValidationError("silhouette: empty input");

  int k = 0;
  for (int a : assignments) {
    if (a < 0) throw ValidationError("silhouette: negative cluster id");
    k = std::max(k, a + 1);
  }
  if (k < 2) throw ValidationError("silhouette: need at least 2 clusters");
  std::vector<long long> sizes(k, 0);
  for (int a : assignments) ++sizes[a];
  for (int c = 0; c < k; ++c)
    if (sizes[c] == 0)
      throw ValidationError("silhouette: cluster " + std::to_string(c) + " is empty");

  std::vector<double> s(n, 0.0);
  const int64_t ni = static_cast<int64_t>(n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < ni; ++i) {
    if (sizes[assignments[i]] == 1) {
      s[i] = 0.0;  // singleton convention
      continue;
    }
    std::vector<double> cluster_sum(k, 0.0);
    auto xi = X.row(i);
    for (size_t j = 0; j < n; ++j) {
      if (j == static_cast<size_t>(i)) continue;
      cluster_sum[assignments[j]] +=
          std::sqrt(dist_sq(xi, X.data.data() + j * dim));
    }
    double a = cluster_sum[assignments[i]] / static_cast<double>(sizes[assignments[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == assignments[i]) continue;
      b = std::min(b, cluster_sum[c] / static_cast<double>(sizes[c]));
    }
    double denom = std::max(a, b);
    s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }

  double total = 0.0;
  for (size_t i = 0; i < n; ++i) total += s[i];
  return total / static_cast<double>(n);
}

ClusterModel select_k(const EmbeddingMatrix& X, const KSweepConfig& cfg) {
  if (X.n < 2) throw ValidationError("select_k: need at least 2 points");
  if (cfg.k_min < 2 || cfg.k_min > cfg.k_max)
    throw ValidationError("select_k: require 2 <= k_min <= k_max");
  if (cfg.restarts < 1) throw ValidationError("select_k: restarts must be >= 1");

  const int hi = std::min<int>(cfg.k_max, static_cast<int>(X.n) - 1);
  if (hi < cfg.k_min)
    throw ValidationError("select_k: k range [" + std::to_string(cfg.k_min) + ", " +
                          std::to_string(cfg.k_max) + "] is empty after clamping to n-1 = " +
                          std::to_string(X.n - 1));

  const int count = hi - cfg.k_min + 1;
  std::vector<ClusterModel> models(count);
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < count; ++idx) {
    const int k = cfg.k_min + idx;
    const uint64_t k_seed = mix_seed(cfg.seed, static_cast<uint64_t>(k));
    ClusterModel best = kmeans(X, k, k_seed, cfg.max_iter, cfg.tol);
    for (int r = 1; r < cfg.restarts; ++r) {
      ClusterModel cand =
          kmeans(X, k, mix_seed(k_seed, static_cast<uint64_t>(r)), cfg.max_iter, cfg.tol);
      if (cand.inertia < best.inertia) best = std::move(cand);
    }
    models[idx] = std::move(best);
  }

  size_t winner = 0;
  for (size_t i = 1; i < models.size(); ++i)
    if (models[i].silhouette > models[winner].silhouette) winner = i;  // ties keep smaller k
  return models[winner];
}

}  // namespace intentforge
