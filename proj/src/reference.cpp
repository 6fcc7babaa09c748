// src/reference.cpp
//
// Naive serial implementations, each written directly from its defining
// formula. Used as oracles in tests and as the baseline in the benchmark.

#include "intentforge/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "intentforge/error.hpp"

namespace intentforge::ref {

double silhouette(const EmbeddingMatrix& X, const std::vector<int>& assignments) {
  const size_t n = X.n;
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  if (k < 2) throw ValidationError("ref::silhouette: need at least 2 clusters");

  std::vector<long long> sizes(k, 0);
  for (int a : assignments) ++sizes[a];

  auto euclid = [&](size_t i, size_t j) {
    double acc = 0.0;
    for (size_t d = 0; d < X.dim; ++d) {
      double diff = X.row(i)[d] - X.row(j)[d];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  };

  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (sizes[assignments[i]] == 1) continue;  // s(i) = 0
    double a = 0.0;
    for (size_t j = 0; j < n; ++j)
      if (j != i && assignments[j] == assignments[i]) a += euclid(i, j);
    a /= static_cast<double>(sizes[assignments[i]] - 1);

    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == assignments[i]) continue;
      double sum = 0.0;
      for (size_t j = 0; j < n; ++j)
        if (assignments[j] == c) sum += euclid(i, j);
      b = std::min(b, sum / static_cast<double>(sizes[c]));
    }
    if (std::max(a, b) > 0.0) total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

double scl_loss(const std::vector<Vector>& phi, const std::vector<int>& labels, double tau) {
  const size_t n = phi.size();
  auto dot = [&](size_t i, size_t j) {
    double acc = 0.0;
    for (size_t d = 0; d < phi[i].size(); ++d) acc += phi[i][d] * phi[j][d];
    return acc;
  };

  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    long long positives = 0;
    for (size_t j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) ++positives;
    if (positives == 0) throw ValidationError("ref::scl_loss: anchor without positives");

    double anchor = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      double denom = 0.0;
      for (size_t c = 0; c < n; ++c)
        if (c != i) denom += std::exp(dot(i, c) / tau);
      anchor += std::log(std::exp(dot(i, j) / tau) / denom);
    }
    loss += -anchor / static_cast<double>(positives);
  }
  return loss;
}

double ce_loss(const std::vector<Vector>& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    double denom = 0.0;
    for (double v : logits[i]) denom += std::exp(v);
    total += -std::log(std::exp(logits[i][labels[i]]) / denom);
  }
  return total / static_cast<double>(logits.size());
}

std::vector<int> assign_nearest(const EmbeddingMatrix& X, const std::vector<double>& centroids,
                                int k) {
  std::vector<int> out(X.n, 0);
  for (size_t i = 0; i < X.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (size_t d = 0; d < X.dim; ++d) {
        double diff = X.row(i)[d] - centroids[static_cast<size_t>(c) * X.dim + d];
        acc += diff * diff;
      }
      if (acc < best) {
        best = acc;
        out[i] = c;
      }
    }
  }
  return out;
}

EmbeddingMatrix embed_all(const std::vector<Utterance>& utterances, const Embedder& embedder,
                          TextField field) {
  EmbeddingMatrix X(utterances.size(), embedder.dim());
  for (size_t i = 0; i < utterances.size(); ++i) {
    Vector v = embedder.embed(utterances[i], field);
    std::copy(v.begin(), v.end(), X.row(i).begin());
  }
  return X;
}

}  // namespace intentforge::ref
