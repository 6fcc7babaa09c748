// intentforge/pipeline.hpp
//
// Config-driven orchestration: train an adapter on a labeled source
// corpus, embed and cluster an unlabeled target corpus, evaluate against
// gold intents when present, and name every cluster. The report is a
// single JSON document with sorted keys and fixed 6-decimal floats, so
// identical configs produce identical bytes.

#ifndef INTENTFORGE_PIPELINE_HPP
#define INTENTFORGE_PIPELINE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intentforge/cluster.hpp"
#include "intentforge/labelgen.hpp"
#include "intentforge/metrics.hpp"
#include "intentforge/scl.hpp"

namespace intentforge {

inline constexpr const char* kVersionStamp = "intentforge 0.1.0";

struct PipelineConfig {
  std::string source_corpus;
  std::string target_corpus;
  std::string embedding = "hash";  // "hash" or path to an embedding table
  size_t hash_dim = 256;
  std::string synonym_lexicon;   // optional
  std::string hypernym_lexicon;  // optional
  std::string output_dir = "out";
  TrainConfig train;
  KSweepConfig sweep;
  LabelerConfig labeler;
  TextField finetune_field = TextField::VerbObject;
  TextField inference_field = TextField::Sentence;
  bool normalize = true;
  uint64_t seed = 0;
  bool strict = false;
  int threads = 0;  // 0 = runtime default
};

// Flat key = value file, full-line # comments, unknown keys rejected.
// The INTENT_FORGE_SEED environment variable overrides `seed`.
PipelineConfig load_pipeline_config(const std::string& path);

struct Report {
  PipelineConfig config;
  int selected_k = 0;
  double silhouette = 0.0;
  std::optional<EvalReport> evaluation;
  std::vector<LabeledCluster> clusters;
  std::vector<std::pair<std::string, int>> assignments;  // key -> cluster
  std::string version = kVersionStamp;
};

// Deterministic bytes: keys sorted at every level, floats "%.6f".
std::string serialize_report(const Report& report);

struct PipelineOutputs {
  Report report;
  AdapterParams adapter;
  ClusterModel model;
  std::vector<Utterance> target_turns;
  EmbeddingMatrix adapted;  // exported for external plots
};

// Embedder chosen by the config: the built-in hash featurizer or a table.
std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config);

// The training stage alone: loads the source corpus, embeds the
// finetune_field texts and trains the adapter on gold intents.
TrainResult pipeline_train(const PipelineConfig& config, const Embedder& embedder);

struct ClusterStage {
  ClusterModel model;
  std::vector<Utterance> turns;
  EmbeddingMatrix adapted;
};

// The clustering stage alone: loads the target corpus, embeds the
// inference_field texts, applies the adapter and sweeps k.
ClusterStage pipeline_cluster(const PipelineConfig& config, const Embedder& embedder,
                              const AdapterParams& adapter);

// Runs train -> embed(target, inference_field) -> adapter -> select_k ->
// evaluate (when gold intents are present) -> label. Does not touch the
// filesystem beyond reading inputs; file emission is the CLI's job.
PipelineOutputs run_pipeline(const PipelineConfig& config);

// run_pipeline plus artifact files under config.output_dir: report.json,
// assignments.jsonl, embeddings.jsonl, adapter.json, model.json. On error
// partially written files are removed.
Report run_pipeline_to_files(const PipelineConfig& config);

// Derived stage seeds, pinned.
uint64_t train_seed(uint64_t run_seed);
uint64_t sweep_seed(uint64_t run_seed);

}  // namespace intentforge

#endif  // INTENTFORGE_PIPELINE_HPP
