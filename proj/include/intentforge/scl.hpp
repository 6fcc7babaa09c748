// intentforge/scl.hpp
//
// Supervised contrastive fine-tuning of a linear embedding adapter.
// The adapter (W, optional bias, temperature tau) maps base vectors to the
// representation used for clustering; training minimizes
//
//   L = sum_i  -1/|P(i)| * sum_{j in P(i)} log( exp(phi_i.phi_j / tau)
//                                             / sum_{k != i} exp(phi_i.phi_k / tau) )
//
// where P(i) is the set of other batch items sharing anchor i's label.
// Batches hold 2N items: N sampled originals plus N synonym-augmented
// views, so every anchor has at least one positive. A mean cross-entropy
// alternative with a throwaway classifier head is provided for ablations.

#ifndef INTENTFORGE_SCL_HPP
#define INTENTFORGE_SCL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "intentforge/corpus.hpp"
#include "intentforge/embed.hpp"
#include "intentforge/rng.hpp"

namespace intentforge {

struct AdapterParams {
  size_t in_dim = 0;
  size_t out_dim = 0;
  std::vector<double> W;  // out_dim x in_dim, row-major
  std::vector<double> b;  // empty means no bias
  double tau = 0.07;
  bool normalize_output = true;
};

AdapterParams identity_adapter(size_t dim, double tau = 0.07, bool normalize = true);

// y = Wx (+ b), L2-normalized when normalize_output is set.
Vector apply_adapter(const AdapterParams& params, const Vector& x);

// Applies the adapter to every row, in parallel.
EmbeddingMatrix apply_adapter_all(const AdapterParams& params, const EmbeddingMatrix& X);

void save_adapter(const AdapterParams& params, const std::string& path);
AdapterParams load_adapter(const std::string& path);

// word -> synonyms, lowercase, file order preserved per word.
struct SynonymLexicon {
  std::unordered_map<std::string, std::vector<std::string>> synonyms;
  bool empty() const { return synonyms.empty(); }
};

// Tab-separated "word<TAB>synonym" pairs, one per line.
SynonymLexicon load_synonym_lexicon(const std::string& path);

// Label-preserving view of a VO pair: with probability 0.5 targets the
// object, otherwise the verb, and swaps in a uniformly drawn synonym if the
// lexicon has any for the chosen word. Draws exactly one coin, plus one
// index draw when synonyms exist.
VerbObject augment_synonym(const VerbObject& pair, const SynonymLexicon& lexicon, Rng& rng);

// Supervised contrastive loss over 2N vectors. Every label must appear at
// least twice in the batch. Softmax terms use max-subtraction.
double scl_loss(const std::vector<Vector>& phi, const std::vector<int>& labels, double tau);

// Analytic d loss / d phi_i for scl_loss.
std::vector<Vector> scl_grad(const std::vector<Vector>& phi, const std::vector<int>& labels,
                             double tau);

// Mean softmax cross-entropy over rows; labels index columns of logits.
double ce_loss(const std::vector<Vector>& logits, const std::vector<int>& labels);
std::vector<Vector> ce_grad(const std::vector<Vector>& logits, const std::vector<int>& labels);

enum class LossKind { Scl, CrossEntropy };

struct TrainConfig {
  double tau = 0.07;
  int max_epochs = 5;
  double learning_rate = 0.05;
  int batch_n = 8;  // N: originals per batch, the batch itself holds 2N
  uint64_t seed = 0;
  double early_stop_rel_tol = 1e-3;
  LossKind loss_kind = LossKind::Scl;
  bool normalize_output = true;
};

struct TrainResult {
  AdapterParams params;             // snapshot from the best epoch
  std::vector<double> epoch_losses; // mean per-anchor loss per epoch run
  int best_epoch = -1;
};

// Loss and full analytic gradient of one batch as a function of the
// adapter (and, for cross-entropy, the classifier head). This is the exact
// path train_adapter steps along, so finite-difference tests on it cover
// the normalization Jacobian.
struct AdapterGrad {
  double loss = 0.0;
  std::vector<double> d_w;     // same shape as params.W
  std::vector<double> d_b;     // same shape as params.b (empty if no bias)
  std::vector<double> d_head;  // same shape as head (empty for SCL)
};

AdapterGrad adapter_loss_and_grad(const AdapterParams& params,
                                  const std::vector<Vector>& batch_x,
                                  const std::vector<int>& labels, LossKind kind,
                                  const std::vector<double>* head, size_t n_classes);

// Trains the adapter with plain mini-batch gradient descent. W starts as
// the identity, epochs shuffle deterministically under config.seed, and
// each batch's second half embeds synonym-augmented VO texts through the
// given embedder (items without a VO pair, or with no table entry for the
// augmented text, reuse their original vector). Stops early when the
// epoch-mean loss fails to improve by early_stop_rel_tol relative, with
// patience 1. Every label must occur at least twice.
TrainResult train_adapter(const std::vector<Vector>& base_vectors,
                          const std::vector<int>& labels,
                          const std::vector<std::optional<VerbObject>>& vo_pairs,
                          const Embedder& embedder, const SynonymLexicon& synonyms,
                          const TrainConfig& config);

}  // namespace intentforge

#endif  // INTENTFORGE_SCL_HPP
