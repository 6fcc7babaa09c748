// tests/testutil.hpp
//
// Shared helpers for the test binaries: temp-file creation, synthetic
// Gaussian blobs, and small corpus builders.

#ifndef INTENTFORGE_TESTS_TESTUTIL_HPP
#define INTENTFORGE_TESTS_TESTUTIL_HPP

#include <fstream>
#include <string>
#include <vector>

#include "intentforge/corpus.hpp"
#include "intentforge/embed.hpp"
#include "intentforge/rng.hpp"

namespace testutil {

inline std::string write_temp(const std::string& name, const std::string& contents) {
  std::ofstream out(name, std::ios::binary);
  out << contents;
  return name;
}

// `blobs` isotropic Gaussians with unit-basis centers (pairwise distance
// sqrt(2)); requires blobs <= dim.
inline intentforge::EmbeddingMatrix gaussian_blobs(int blobs, int per_blob, size_t dim,
                                                   double sigma, uint64_t seed,
                                                   std::vector<int>* labels_out = nullptr) {
  intentforge::Rng rng(seed);
  intentforge::EmbeddingMatrix X(static_cast<size_t>(blobs) * per_blob, dim);
  if (labels_out) labels_out->assign(X.n, 0);
  size_t row = 0;
  for (int b = 0; b < blobs; ++b) {
    for (int i = 0; i < per_blob; ++i, ++row) {
      auto r = X.row(row);
      for (size_t d = 0; d < dim; ++d) r[d] = sigma * rng.gaussian();
      r[static_cast<size_t>(b)] += 1.0;
      if (labels_out) (*labels_out)[row] = b;
    }
  }
  return X;
}

inline intentforge::Utterance make_utterance(const std::string& did, int turn,
                                             intentforge::Speaker speaker,
                                             std::vector<std::string> acts,
                                             const std::string& text) {
  intentforge::Utterance u;
  u.dialogue_id = did;
  u.turn_id = turn;
  u.speaker = speaker;
  u.dialogue_acts.insert(acts.begin(), acts.end());
  u.text = text;
  return u;
}

// Cross-domain setup for the fine-tuning benefit checks. Intents are
// verb-defined in both domains; object words overlap across intents, so
// objects mislead a raw embedding, and every verb has a synonym variant
// that appears only in target utterances plus the synonym lexicon. An
// identity embedding therefore splits intents by surface verb and mixes
// them through shared objects, while an adapter trained on the source can
// amplify verb features and merge the synonym halves.
struct CrossDomainData {
  intentforge::Corpus source;
  intentforge::Corpus target;
  std::string synonyms_tsv;
};

inline CrossDomainData cross_domain_corpora(uint64_t seed, int source_per_intent = 12,
                                            int target_per_intent = 20) {
  using intentforge::IntentTemplate;
  using intentforge::SyntheticIntent;
  using intentforge::SyntheticSpec;

  const char* verbs[6] = {"check", "pay", "cancel", "update", "open", "close"};
  const char* synonyms[6] = {"verify", "settle", "stop", "revise", "start", "finish"};
  // two objects per intent, each shared with a neighbouring intent
  const char* source_objects[6] = {"balance", "bill", "policy", "address", "account", "claim"};
  const char* target_objects[6] = {"card", "loan", "transfer", "statement", "pin", "branch"};
  const char* patterns[4] = {"please {verb} my {object}", "i need to {verb} my {object}",
                             "{verb} my {object} today", "can you {verb} the {object}"};

  SyntheticSpec src;
  src.corpus_name = "source-" + std::to_string(seed);
  for (int i = 0; i < 6; ++i) {
    SyntheticIntent intent;
    intent.name = std::string("Src") + verbs[i];
    intent.count = source_per_intent;
    for (int obj = 0; obj < 2; ++obj)
      for (int p = 0; p < 2; ++p)
        intent.templates.push_back(IntentTemplate{verbs[i], source_objects[(i + obj) % 6],
                                                  patterns[(i + 2 * obj + p) % 4]});
    src.intents.push_back(intent);
  }

  SyntheticSpec tgt;
  tgt.corpus_name = "target-" + std::to_string(seed);
  for (int i = 0; i < 6; ++i) {
    SyntheticIntent intent;
    intent.name = std::string("Tgt") + verbs[i];
    intent.count = target_per_intent;
    for (int v = 0; v < 2; ++v) {
      const char* verb = (v == 0) ? verbs[i] : synonyms[i];
      for (int obj = 0; obj < 2; ++obj)
        intent.templates.push_back(IntentTemplate{verb, target_objects[(i + obj) % 6],
                                                  patterns[(i + v + obj) % 4]});
    }
    tgt.intents.push_back(intent);
  }

  CrossDomainData data;
  data.source = intentforge::generate_synthetic(src, intentforge::mix_seed(seed, 1));
  data.target = intentforge::generate_synthetic(tgt, intentforge::mix_seed(seed, 2));
  for (int i = 0; i < 6; ++i)
    data.synonyms_tsv += std::string(verbs[i]) + "\t" + synonyms[i] + "\n";
  return data;
}

}  // namespace testutil

#endif  // INTENTFORGE_TESTS_TESTUTIL_HPP
