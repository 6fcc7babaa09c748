// src/pipeline.cpp

#include "intentforge/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "intentforge/error.hpp"
#include "intentforge/jsonio.hpp"
#include "intentforge/rng.hpp"

namespace intentforge {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t train_seed(uint64_t run_seed) { return mix_seed(run_seed, 0x7261696ELL); }
uint64_t sweep_seed(uint64_t run_seed) { return mix_seed(run_seed, 0x73776565LL); }

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key \"" + key + "\": expected true/false, got \"" + value + "\"");
}

TextField parse_field(const std::string& key, const std::string& value) {
  if (value == "sentence") return TextField::Sentence;
  if (value == "verb_object") return TextField::VerbObject;
  throw ValidationError("config key \"" + key +
                        "\": expected sentence or verb_object, got \"" + value + "\"");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T out;
  ss >> out;
  if (ss.fail() || !ss.eof())
    throw ValidationError("config key \"" + key + "\": bad number \"" + value + "\"");
  return out;
}

std::string field_name(TextField f) {
  return f == TextField::Sentence ? "sentence" : "verb_object";
}

// Runs one pipeline stage; errors carry the stage name.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage ") + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config) {
  if (config.embedding == "hash")
    return std::make_unique<HashEmbedder>(config.hash_dim);
  return std::make_unique<TableEmbedder>(load_embedding_table(config.embedding));
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);

  PipelineConfig cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));

    if (key == "source_corpus") cfg.source_corpus = value;
    else if (key == "target_corpus") cfg.target_corpus = value;
    else if (key == "embedding") cfg.embedding = value;
    else if (key == "hash_dim") cfg.hash_dim = parse_number<size_t>(key, value);
    else if (key == "synonym_lexicon") cfg.synonym_lexicon = value;
    else if (key == "hypernym_lexicon") cfg.hypernym_lexicon = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "tau") cfg.train.tau = parse_number<double>(key, value);
    else if (key == "max_epochs") cfg.train.max_epochs = parse_number<int>(key, value);
    else if (key == "learning_rate") cfg.train.learning_rate = parse_number<double>(key, value);
    else if (key == "batch_n") cfg.train.batch_n = parse_number<int>(key, value);
    else if (key == "early_stop_rel_tol")
      cfg.train.early_stop_rel_tol = parse_number<double>(key, value);
    else if (key == "loss") {
      if (value == "scl") cfg.train.loss_kind = LossKind::Scl;
      else if (value == "cross_entropy") cfg.train.loss_kind = LossKind::CrossEntropy;
      else throw ValidationError("config key \"loss\": expected scl or cross_entropy");
    }
    else if (key == "k_min") cfg.sweep.k_min = parse_number<int>(key, value);
    else if (key == "k_max") cfg.sweep.k_max = parse_number<int>(key, value);
    else if (key == "kmeans_max_iter") cfg.sweep.max_iter = parse_number<int>(key, value);
    else if (key == "kmeans_tol") cfg.sweep.tol = parse_number<double>(key, value);
    else if (key == "restarts") cfg.sweep.restarts = parse_number<int>(key, value);
    else if (key == "alpha") cfg.labeler.alpha = parse_number<double>(key, value);
    else if (key == "finetune_field") cfg.finetune_field = parse_field(key, value);
    else if (key == "inference_field") cfg.inference_field = parse_field(key, value);
    else if (key == "normalize") cfg.normalize = parse_bool(key, value);
    else if (key == "seed") cfg.seed = parse_number<uint64_t>(key, value);
    else if (key == "strict") cfg.strict = parse_bool(key, value);
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else throw ValidationError("config line " + std::to_string(line_no) +
                               ": unknown key \"" + key + "\"");
  }

  if (const char* env = std::getenv("INTENT_FORGE_SEED"))
    cfg.seed = parse_number<uint64_t>("INTENT_FORGE_SEED", env);

  if (cfg.source_corpus.empty()) throw ValidationError("config: source_corpus is required");
  if (cfg.target_corpus.empty()) throw ValidationError("config: target_corpus is required");

  // input paths resolve relative to the config file; output_dir stays
  // relative to the working directory
  fs::path base = fs::path(path).parent_path();
  auto anchor = [&base](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
  };
  anchor(cfg.source_corpus);
  anchor(cfg.target_corpus);
  if (cfg.embedding != "hash") anchor(cfg.embedding);
  anchor(cfg.synonym_lexicon);
  anchor(cfg.hypernym_lexicon);
  return cfg;
}

namespace {

std::vector<Vector> matrix_rows(const EmbeddingMatrix& X) {
  std::vector<Vector> rows(X.n);
  for (size_t i = 0; i < X.n; ++i) rows[i].assign(X.row(i).begin(), X.row(i).end());
  return rows;
}

}  // namespace

TrainResult pipeline_train(const PipelineConfig& config, const Embedder& embedder) {
  Corpus source = load_corpus(config.source_corpus, config.strict);
  std::vector<Utterance> turns = select_intent_turns(source);
  if (turns.empty())
    throw ValidationError("source corpus has no Customer InformIntent turns");
  std::string missing;
  for (const Utterance& u : turns)
    if (!u.gold_intent) missing += (missing.empty() ? "" : ", ") + u.key();
  if (!missing.empty())
    throw ValidationError("source turns lack gold intents: " + missing);

  std::map<std::string, int> counts_by_name;
  for (const Utterance& u : turns) ++counts_by_name[*u.gold_intent];
  std::string rare;
  for (const auto& [name, count] : counts_by_name)
    if (count < 2) rare += (rare.empty() ? "" : ", ") + name;
  if (!rare.empty())
    throw ValidationError("source intents with fewer than 2 turns: " + rare);

  std::map<std::string, int> name_to_id;
  int next_id = 0;
  for (const auto& [name, count] : counts_by_name) name_to_id[name] = next_id++;

  std::vector<int> labels;
  std::vector<std::optional<VerbObject>> vo_pairs;
  for (const Utterance& u : turns) {
    labels.push_back(name_to_id[*u.gold_intent]);
    vo_pairs.push_back(u.verb_object);
  }

  EmbeddingMatrix base = embed_all(turns, embedder, config.finetune_field);
  SynonymLexicon synonyms;
  if (!config.synonym_lexicon.empty())
    synonyms = load_synonym_lexicon(config.synonym_lexicon);

  TrainConfig tc = config.train;
  tc.seed = train_seed(config.seed);
  tc.normalize_output = config.normalize;
  return train_adapter(matrix_rows(base), labels, vo_pairs, embedder, synonyms, tc);
}

ClusterStage pipeline_cluster(const PipelineConfig& config, const Embedder& embedder,
                              const AdapterParams& adapter) {
  ClusterStage out;
  Corpus target = load_corpus(config.target_corpus, config.strict);
  out.turns = select_intent_turns(target);
  if (out.turns.size() < 2)
    throw ValidationError("target corpus has fewer than 2 Customer InformIntent turns");
  EmbeddingMatrix base = embed_all(out.turns, embedder, config.inference_field);
  out.adapted = apply_adapter_all(adapter, base);
  KSweepConfig sc = config.sweep;
  sc.seed = sweep_seed(config.seed);
  out.model = select_k(out.adapted, sc);
  return out;
}

PipelineOutputs run_pipeline(const PipelineConfig& config) {
  if (config.threads > 0) omp_set_num_threads(config.threads);

  auto embedder = stage("embedder", [&] { return make_embedder(config); });

  TrainResult trained =
      stage("train", [&] { return pipeline_train(config, *embedder); });

  PipelineOutputs out;
  out.adapter = trained.params;

  stage("cluster", [&] {
    ClusterStage cs = pipeline_cluster(config, *embedder, out.adapter);
    out.model = std::move(cs.model);
    out.target_turns = std::move(cs.turns);
    out.adapted = std::move(cs.adapted);
    return 0;
  });

  // --- evaluate (over the turns that carry gold intents) ---------------
  stage("evaluate", [&] {
    std::vector<int> pred;
    std::vector<std::string> gold;
    for (size_t i = 0; i < out.target_turns.size(); ++i) {
      if (!out.target_turns[i].gold_intent) continue;
      pred.push_back(out.model.assignments[i]);
      gold.push_back(*out.target_turns[i].gold_intent);
    }
    if (!pred.empty()) out.report.evaluation = evaluate(pred, gold);
    return 0;
  });

  // --- label ------------------------------------------------------------
  stage("label", [&] {
    HypernymLexicon hyper;
    if (!config.hypernym_lexicon.empty())
      hyper = load_hypernym_lexicon(config.hypernym_lexicon);
    std::vector<std::vector<Utterance>> members(out.model.k);
    for (size_t i = 0; i < out.target_turns.size(); ++i)
      members[out.model.assignments[i]].push_back(out.target_turns[i]);
    for (int c = 0; c < out.model.k; ++c) {
      VoCountResult counted = count_vo(members[c]);
      out.report.clusters.push_back(
          generate_label(counted.counts, hyper, config.labeler, c, counted.support));
    }
    return 0;
  });

  out.report.config = config;
  out.report.selected_k = out.model.k;
  out.report.silhouette = out.model.silhouette;
  for (size_t i = 0; i < out.target_turns.size(); ++i)
    out.report.assignments.emplace_back(out.target_turns[i].key(), out.model.assignments[i]);
  return out;
}

std::string serialize_report(const Report& report) {
  json doc;
  const PipelineConfig& c = report.config;
  json cfg;
  cfg["source_corpus"] = c.source_corpus;
  cfg["target_corpus"] = c.target_corpus;
  cfg["embedding"] = c.embedding;
  cfg["hash_dim"] = c.hash_dim;
  cfg["synonym_lexicon"] = c.synonym_lexicon;
  cfg["hypernym_lexicon"] = c.hypernym_lexicon;
  cfg["output_dir"] = c.output_dir;
  cfg["tau"] = c.train.tau;
  cfg["max_epochs"] = c.train.max_epochs;
  cfg["learning_rate"] = c.train.learning_rate;
  cfg["batch_n"] = c.train.batch_n;
  cfg["early_stop_rel_tol"] = c.train.early_stop_rel_tol;
  cfg["loss"] = c.train.loss_kind == LossKind::Scl ? "scl" : "cross_entropy";
  cfg["k_min"] = c.sweep.k_min;
  cfg["k_max"] = c.sweep.k_max;
  cfg["kmeans_max_iter"] = c.sweep.max_iter;
  cfg["kmeans_tol"] = c.sweep.tol;
  cfg["restarts"] = c.sweep.restarts;
  cfg["alpha"] = c.labeler.alpha;
  cfg["finetune_field"] = field_name(c.finetune_field);
  cfg["inference_field"] = field_name(c.inference_field);
  cfg["normalize"] = c.normalize;
  cfg["seed"] = c.seed;
  cfg["strict"] = c.strict;
  cfg["threads"] = c.threads;
  doc["config"] = cfg;

  doc["selected_k"] = report.selected_k;
  doc["silhouette"] = report.silhouette;
  doc["version"] = report.version;

  if (report.evaluation) {
    const EvalReport& e = *report.evaluation;
    json ev;
    ev["nmi"] = e.nmi;
    ev["accuracy"] = e.accuracy;
    ev["precision_majority"] = e.precision;
    ev["k_predicted"] = e.k_predicted;
    ev["k_gold"] = e.k_gold;
    ev["evaluated_n"] = e.n;
    json mapping = json::array();
    for (const auto& [cluster, intent] : e.mapping)
      mapping.push_back(json{{"cluster", cluster}, {"intent", intent}});
    ev["mapping"] = mapping;
    doc["evaluation"] = ev;
  }

  json clusters = json::array();
  for (const LabeledCluster& lc : report.clusters) {
    json top3 = json::array();
    for (const auto& [pair, count] : lc.top3)
      top3.push_back(json{{"pair", pair.dashed()}, {"count", count}});
    clusters.push_back(json{{"cluster_id", lc.cluster_id},
                            {"label", lc.label.dashed()},
                            {"top3", top3},
                            {"used_hypernym", lc.used_hypernym},
                            {"support", lc.support}});
  }
  doc["clusters"] = clusters;

  json assignments = json::array();
  for (const auto& [key, cluster] : report.assignments)
    assignments.push_back(json{{"key", key}, {"cluster", cluster}});
  doc["assignments"] = assignments;

  return dump_deterministic(doc) + "\n";
}

Report run_pipeline_to_files(const PipelineConfig& config) {
  PipelineOutputs out = run_pipeline(config);

  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory: " + config.output_dir);

  std::vector<fs::path> written;
  auto emit = [&](const fs::path& name, const std::string& contents) {
    fs::path p = dir / name;
    write_file(p.string(), contents);
    written.push_back(p);
  };

  try {
    emit("report.json", serialize_report(out.report));

    std::string assignments;
    for (const auto& [key, cluster] : out.report.assignments)
      assignments += json{{"key", key}, {"cluster", cluster}}.dump() + "\n";
    emit("assignments.jsonl", assignments);

    std::string vectors;
    for (size_t i = 0; i < out.target_turns.size(); ++i) {
      auto row = out.adapted.row(i);
      vectors += json{{"key", out.target_turns[i].key()},
                      {"vector", std::vector<double>(row.begin(), row.end())}}
                     .dump() +
                 "\n";
    }
    emit("embeddings.jsonl", vectors);

    json model;
    model["k"] = out.model.k;
    model["dim"] = out.model.dim;
    model["silhouette"] = out.model.silhouette;
    model["inertia"] = out.model.inertia;
    model["seed"] = out.model.seed;
    model["centroids"] = out.model.centroids;
    emit("model.json", model.dump());

    save_adapter(out.adapter, (dir / "adapter.json").string());
    written.push_back(dir / "adapter.json");
  } catch (...) {
    for (const fs::path& p : written) fs::remove(p, ec);
    throw;
  }
  return out.report;
}

}  // namespace intentforge
