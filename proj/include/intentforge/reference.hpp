// intentforge/reference.hpp
//
// Serial reference implementations written straight from the defining
// formulas, kept deliberately independent of the optimized kernels. Tests
// compare the two paths and the benchmark times them against each other.
// Nothing here is called from production code.

#ifndef INTENTFORGE_REFERENCE_HPP
#define INTENTFORGE_REFERENCE_HPP

#include <vector>

#include "intentforge/embed.hpp"

namespace intentforge::ref {

// Mean silhouette by the direct O(n^2) definition.
double silhouette(const EmbeddingMatrix& X, const std::vector<int>& assignments);

// Supervised contrastive loss as a literal double loop over anchors and
// positives, no max-subtraction.
double scl_loss(const std::vector<Vector>& phi, const std::vector<int>& labels, double tau);

// Mean softmax cross-entropy, literal formula.
double ce_loss(const std::vector<Vector>& logits, const std::vector<int>& labels);

// Nearest-centroid assignment, serial.
std::vector<int> assign_nearest(const EmbeddingMatrix& X, const std::vector<double>& centroids,
                                int k);

// Serial row-by-row embedding.
EmbeddingMatrix embed_all(const std::vector<Utterance>& utterances, const Embedder& embedder,
                          TextField field);

}  // namespace intentforge::ref

#endif  // INTENTFORGE_REFERENCE_HPP
