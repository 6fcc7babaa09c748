// tools/bench_kernels.cpp
//
// Times the OpenMP kernels against their serial reference implementations
// on synthetic data and reports the largest result difference (expected to
// be exactly zero: the parallel kernels use pinned reduction orders).

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "intentforge/cluster.hpp"
#include "intentforge/corpus.hpp"
#include "intentforge/embed.hpp"
#include "intentforge/reference.hpp"
#include "intentforge/rng.hpp"
#include "intentforge/scl.hpp"

using namespace intentforge;

namespace {

EmbeddingMatrix random_matrix(size_t n, size_t dim, uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix X(n, dim);
  for (double& v : X.data) v = rng.gaussian();
  return X;
}

std::vector<int> random_assignments(size_t n, int k, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> a(n);
  for (size_t i = 0; i < n; ++i)
    a[i] = i < static_cast<size_t>(k) ? static_cast<int>(i)  // every cluster non-empty
                                      : static_cast<int>(rng.uniform_below(k));
  return a;
}

template <typename F>
double time_ms(F&& f, int reps = 3) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    double t0 = omp_get_wtime();
    f();
    double t1 = omp_get_wtime();
    best = std::min(best, (t1 - t0) * 1000.0);
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double max_diff) {
  std::printf("%-24s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %g\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {  // silhouette, the O(n^2) hot spot of the k sweep
    EmbeddingMatrix X = random_matrix(3000, 32, 11);
    std::vector<int> a = random_assignments(X.n, 12, 12);
    double ref_val = 0.0, par_val = 0.0;
    double t_ref = time_ms([&] { ref_val = ref::silhouette(X, a); });
    double t_par = time_ms([&] { par_val = silhouette_score(X, a); });
    report("silhouette", t_ref, t_par, std::abs(ref_val - par_val));
  }

  {  // hash embedding of a corpus
    SyntheticSpec spec;
    spec.corpus_name = "bench";
    for (int i = 0; i < 8; ++i) {
      SyntheticIntent intent;
      intent.name = "Intent" + std::to_string(i);
      intent.count = 1500;
      intent.templates.push_back({"verb" + std::to_string(i), "object" + std::to_string(i),
                                  "well i really need to {verb} the {object} right away"});
      spec.intents.push_back(intent);
    }
    Corpus corpus = generate_synthetic(spec, 5);
    HashEmbedder embedder(256);
    EmbeddingMatrix ref_X, par_X;
    double t_ref = time_ms(
        [&] { ref_X = ref::embed_all(corpus.utterances, embedder, TextField::Sentence); });
    double t_par =
        time_ms([&] { par_X = embed_all(corpus.utterances, embedder, TextField::Sentence); });
    double max_diff = 0.0;
    for (size_t i = 0; i < ref_X.data.size(); ++i)
      max_diff = std::max(max_diff, std::abs(ref_X.data[i] - par_X.data[i]));
    report("embed_all (hash)", t_ref, t_par, max_diff);
  }

  {  // k sweep: one thread vs all, identical selection required
    EmbeddingMatrix X = random_matrix(1200, 24, 21);
    KSweepConfig cfg;
    cfg.k_min = 2;
    cfg.k_max = 16;
    cfg.seed = 7;
    ClusterModel serial, parallel;
    int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    double t_one = time_ms([&] { serial = select_k(X, cfg); }, 1);
    omp_set_num_threads(max_threads);
    double t_all = time_ms([&] { parallel = select_k(X, cfg); }, 1);
    double diff = std::abs(serial.silhouette - parallel.silhouette) +
                  std::abs(serial.k - parallel.k);
    report("select_k sweep", t_one, t_all, diff);
  }

  {  // SCL loss on one large batch
    Rng rng(31);
    const size_t n = 512, dim = 128;
    std::vector<Vector> phi(n, Vector(dim));
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) {
      for (double& v : phi[i]) v = rng.gaussian();
      l2_normalize(phi[i]);
      labels[i] = static_cast<int>(i % 8);
    }
    double ref_val = 0.0, par_val = 0.0;
    double t_ref = time_ms([&] { ref_val = ref::scl_loss(phi, labels, 0.07); });
    double t_par = time_ms([&] { par_val = scl_loss(phi, labels, 0.07); });
    report("scl_loss", t_ref, t_par, std::abs(ref_val - par_val));
  }

  return 0;
}
