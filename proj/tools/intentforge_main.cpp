// tools/intentforge_main.cpp
//
// intentforge: zero-shot intent induction over dialogue corpora.
// Subcommands: validate, train, cluster, evaluate, label, run.
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "intentforge/error.hpp"
#include "intentforge/jsonio.hpp"
#include "intentforge/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace intentforge;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool strict = false;
  int threads = 0;
  int64_t seed = -1;  // -1 = keep config value
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "pipeline config file");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out_dir, "override the output directory");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = runtime default)");
  cmd->add_flag("--strict", opts.strict, "reject unknown corpus fields");
}

PipelineConfig resolve_config(const CommonOpts& opts) {
  PipelineConfig cfg = load_pipeline_config(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.strict) cfg.strict = true;
  if (opts.threads > 0) cfg.threads = opts.threads;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

std::map<std::string, int> read_assignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open assignments file: " + path);
  std::map<std::string, int> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("key") ||
        !rec["key"].is_string() || !rec.contains("cluster") ||
        !rec["cluster"].is_number_integer())
      throw ValidationError("assignments line " + std::to_string(line_no) +
                            ": expected {\"key\": string, \"cluster\": int}");
    if (!out.emplace(rec["key"].get<std::string>(), rec["cluster"].get<int>()).second)
      throw ValidationError("assignments line " + std::to_string(line_no) +
                            ": duplicate key \"" + rec["key"].get<std::string>() + "\"");
  }
  if (out.empty()) throw ValidationError("assignments file is empty: " + path);
  return out;
}

int cmd_validate(const std::string& corpus_path, bool strict) {
  Corpus corpus = load_corpus(corpus_path, strict);
  size_t intent_turns = select_intent_turns(corpus).size();
  size_t with_vo = 0, with_gold = 0;
  for (const Utterance& u : corpus.utterances) {
    if (u.verb_object) ++with_vo;
    if (u.gold_intent) ++with_gold;
  }
  std::cout << "corpus: " << corpus_path << "\n"
            << "utterances: " << corpus.utterances.size() << "\n"
            << "customer InformIntent turns: " << intent_turns << "\n"
            << "with verb_object: " << with_vo << "\n"
            << "with gold_intent: " << with_gold << "\n"
            << "gold intents: " << corpus.intent_inventory.size() << "\n";
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  PipelineConfig cfg = resolve_config(opts);
  auto embedder = make_embedder(cfg);
  TrainResult result = pipeline_train(cfg, *embedder);

  fs::create_directories(cfg.output_dir);
  std::string path = (fs::path(cfg.output_dir) / "adapter.json").string();
  save_adapter(result.params, path);

  std::cout << "adapter: " << path << "\n";
  std::cout << "best epoch: " << result.best_epoch << "\n";
  for (size_t e = 0; e < result.epoch_losses.size(); ++e)
    std::cout << "epoch " << e << " mean loss: " << result.epoch_losses[e] << "\n";
  return 0;
}

int cmd_cluster(const CommonOpts& opts, const std::string& adapter_path) {
  PipelineConfig cfg = resolve_config(opts);
  auto embedder = make_embedder(cfg);
  AdapterParams adapter = adapter_path.empty()
                              ? identity_adapter(embedder->dim(), cfg.train.tau, cfg.normalize)
                              : load_adapter(adapter_path);
  ClusterStage cs = pipeline_cluster(cfg, *embedder, adapter);

  fs::create_directories(cfg.output_dir);
  fs::path dir(cfg.output_dir);
  std::string assignments;
  for (size_t i = 0; i < cs.turns.size(); ++i)
    assignments +=
        json{{"key", cs.turns[i].key()}, {"cluster", cs.model.assignments[i]}}.dump() + "\n";
  write_file((dir / "assignments.jsonl").string(), assignments);

  json model;
  model["k"] = cs.model.k;
  model["dim"] = cs.model.dim;
  model["silhouette"] = cs.model.silhouette;
  model["inertia"] = cs.model.inertia;
  model["seed"] = cs.model.seed;
  model["centroids"] = cs.model.centroids;
  write_file((dir / "model.json").string(), model.dump());

  std::cout << "selected k: " << cs.model.k << "\n"
            << "silhouette: " << cs.model.silhouette << "\n"
            << "assignments: " << (dir / "assignments.jsonl").string() << "\n"
            << "model: " << (dir / "model.json").string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& assignments_path, const std::string& corpus_path,
                 bool strict) {
  std::map<std::string, int> assigned = read_assignments(assignments_path);
  Corpus corpus = load_corpus(corpus_path, strict);

  std::map<std::string, const Utterance*> by_key;
  for (const Utterance& u : corpus.utterances) by_key[u.key()] = &u;

  std::vector<int> pred;
  std::vector<std::string> gold;
  for (const auto& [key, cluster] : assigned) {
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw ValidationError("assignment key \"" + key + "\" not found in corpus");
    if (!it->second->gold_intent)
      throw ValidationError("utterance \"" + key + "\" has no gold intent");
    pred.push_back(cluster);
    gold.push_back(*it->second->gold_intent);
  }

  EvalReport report = evaluate(pred, gold);
  json doc;
  doc["nmi"] = report.nmi;
  doc["accuracy"] = report.accuracy;
  doc["precision_majority"] = report.precision;
  doc["k_predicted"] = report.k_predicted;
  doc["k_gold"] = report.k_gold;
  doc["evaluated_n"] = report.n;
  json mapping = json::array();
  for (const auto& [cluster, intent] : report.mapping)
    mapping.push_back(json{{"cluster", cluster}, {"intent", intent}});
  doc["mapping"] = mapping;
  std::cout << dump_deterministic(doc) << "\n";
  return 0;
}

int cmd_label(const std::string& assignments_path, const std::string& corpus_path,
              const std::string& lexicon_path, double alpha, bool strict) {
  std::map<std::string, int> assigned = read_assignments(assignments_path);
  Corpus corpus = load_corpus(corpus_path, strict);
  HypernymLexicon lexicon;
  if (!lexicon_path.empty()) lexicon = load_hypernym_lexicon(lexicon_path);

  std::map<std::string, const Utterance*> by_key;
  for (const Utterance& u : corpus.utterances) by_key[u.key()] = &u;

  int k = 0;
  for (const auto& [key, cluster] : assigned) {
    if (cluster < 0) throw ValidationError("negative cluster id for key \"" + key + "\"");
    if (!by_key.count(key))
      throw ValidationError("assignment key \"" + key + "\" not found in corpus");
    k = std::max(k, cluster + 1);
  }
  std::vector<std::vector<Utterance>> members(k);
  for (const Utterance& u : corpus.utterances) {
    auto it = assigned.find(u.key());
    if (it != assigned.end()) members[it->second].push_back(u);
  }

  LabelerConfig lc{.alpha = alpha, .max_hops = 2};
  json out = json::array();
  for (int c = 0; c < k; ++c) {
    VoCountResult counted = count_vo(members[c]);
    LabeledCluster labeled = generate_label(counted.counts, lexicon, lc, c, counted.support);
    json top3 = json::array();
    for (const auto& [pair, count] : labeled.top3)
      top3.push_back(json{{"pair", pair.dashed()}, {"count", count}});
    out.push_back(json{{"cluster_id", labeled.cluster_id},
                       {"label", labeled.label.dashed()},
                       {"top3", top3},
                       {"used_hypernym", labeled.used_hypernym},
                       {"support", labeled.support}});
  }
  std::cout << dump_deterministic(out) << "\n";
  return 0;
}

int cmd_run(const CommonOpts& opts) {
  PipelineConfig cfg = resolve_config(opts);
  Report report = run_pipeline_to_files(cfg);
  std::cout << serialize_report(report);
  std::cerr << "report: " << (fs::path(cfg.output_dir) / "report.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intentforge: zero-shot intent induction toolkit"};
  app.require_subcommand(1);

  // validate
  std::string corpus_path;
  bool validate_strict = false;
  auto* validate = app.add_subcommand("validate", "check a corpus file");
  validate->add_option("corpus", corpus_path, "corpus JSONL file")->required();
  validate->add_flag("--strict", validate_strict, "reject unknown fields");

  // train
  CommonOpts train_opts;
  auto* train = app.add_subcommand("train", "fine-tune the embedding adapter");
  add_common(train, train_opts, true);

  // cluster
  CommonOpts cluster_opts;
  std::string adapter_path;
  auto* cluster = app.add_subcommand("cluster", "cluster the target corpus");
  add_common(cluster, cluster_opts, true);
  cluster->add_option("--adapter", adapter_path, "adapter file (default: identity)");

  // evaluate
  std::string eval_assignments, eval_corpus;
  bool eval_strict = false;
  auto* evaluate = app.add_subcommand("evaluate", "score assignments against gold intents");
  evaluate->add_option("--assignments", eval_assignments, "assignments JSONL")->required();
  evaluate->add_option("--corpus", eval_corpus, "corpus with gold intents")->required();
  evaluate->add_flag("--strict", eval_strict, "reject unknown fields");

  // label
  std::string label_assignments, label_corpus, label_lexicon;
  double label_alpha = 2.0;
  bool label_strict = false;
  auto* label = app.add_subcommand("label", "name clusters with Verb-Object labels");
  label->add_option("--assignments", label_assignments, "assignments JSONL")->required();
  label->add_option("--corpus", label_corpus, "corpus file")->required();
  label->add_option("--lexicon", label_lexicon, "hypernym lexicon TSV");
  label->add_option("--alpha", label_alpha, "hypernym trigger ratio");
  label->add_flag("--strict", label_strict, "reject unknown fields");

  // run
  CommonOpts run_opts;
  auto* run = app.add_subcommand("run", "full pipeline: train, cluster, evaluate, label");
  add_common(run, run_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(corpus_path, validate_strict);
    if (train->parsed()) return cmd_train(train_opts);
    if (cluster->parsed()) return cmd_cluster(cluster_opts, adapter_path);
    if (evaluate->parsed()) return cmd_evaluate(eval_assignments, eval_corpus, eval_strict);
    if (label->parsed())
      return cmd_label(label_assignments, label_corpus, label_lexicon, label_alpha,
                       label_strict);
    if (run->parsed()) return cmd_run(run_opts);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
