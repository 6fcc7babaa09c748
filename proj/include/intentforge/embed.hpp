// intentforge/embed.hpp
//
// Base utterance vectors. Two embedders implement the same interface: a
// deterministic feature-hashing featurizer (the desk-scale stand-in for a
// sentence encoder) and a lookup table loaded from file. Row construction
// in embed_all is data parallel; rows are independent so results are
// identical for any thread count.

#ifndef INTENTFORGE_EMBED_HPP
#define INTENTFORGE_EMBED_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "intentforge/corpus.hpp"

namespace intentforge {

using Vector = std::vector<double>;

// Row-major n x dim matrix, row i aligned with utterance i.
struct EmbeddingMatrix {
  size_t n = 0;
  size_t dim = 0;
  std::vector<double> data;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(size_t n_, size_t dim_) : n(n_), dim(dim_), data(n_ * dim_, 0.0) {}

  std::span<double> row(size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const double> row(size_t i) const { return {data.data() + i * dim, dim}; }
};

// In-place v / ||v||2; the zero vector is returned unchanged.
void l2_normalize(Vector& v);
Vector l2_normalized(Vector v);

// Deterministic text featurizer, pinned bit-exactly:
// lowercase fold, tokenize on non-alphanumerics, emit each whole token plus
// its character 3-, 4- and 5-grams, hash every feature with 64-bit FNV-1a,
// bucket = hash mod dim, sign from bit 63 (+1 if clear), accumulate and
// L2-normalize. dim must be >= 8.
Vector hash_embed(std::string_view text, size_t dim);

struct EmbeddingTable {
  size_t dim = 0;
  std::unordered_map<std::string, Vector> entries;
};

// JSONL file of {"key": string, "vector": [numbers]}. Keys are either
// "<dialogue_id>:<turn_id>" or raw texts prefixed "text:". All vectors
// must share one dimension; duplicates are rejected.
EmbeddingTable load_embedding_table(const std::string& path);

enum class TextField { Sentence, VerbObject };

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual size_t dim() const = 0;
  // Vector for an utterance's chosen field. Throws ValidationError if the
  // utterance cannot be embedded (missing VO pair, missing table key).
  virtual Vector embed(const Utterance& u, TextField field) const = 0;
  // Vector for a free-standing text (augmented views). nullopt when the
  // embedder has no entry for it.
  virtual std::optional<Vector> embed_text(const std::string& text) const = 0;
};

class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(size_t dim);
  size_t dim() const override { return dim_; }
  Vector embed(const Utterance& u, TextField field) const override;
  std::optional<Vector> embed_text(const std::string& text) const override;

 private:
  size_t dim_;
};

class TableEmbedder final : public Embedder {
 public:
  explicit TableEmbedder(EmbeddingTable table);
  size_t dim() const override { return table_.dim; }
  // Sentence field: "<dialogue_id>:<turn_id>" key, falling back to
  // "text:<text>". VerbObject field: "text:<verb> <object>".
  Vector embed(const Utterance& u, TextField field) const override;
  std::optional<Vector> embed_text(const std::string& text) const override;

 private:
  EmbeddingTable table_;
};

// Embeds every utterance's chosen field, one row per utterance, in
// parallel. field == VerbObject requires a VO pair on every utterance;
// offenders are listed in the error.
EmbeddingMatrix embed_all(const std::vector<Utterance>& utterances,
                          const Embedder& embedder, TextField field);

}  // namespace intentforge

#endif  // INTENTFORGE_EMBED_HPP
