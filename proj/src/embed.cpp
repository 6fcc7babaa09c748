// src/embed.cpp

#include "intentforge/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "intentforge/error.hpp"

namespace intentforge {

using nlohmann::json;

void l2_normalize(Vector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) return;
  double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

Vector l2_normalized(Vector v) {
  l2_normalize(v);
  return v;
}

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = kFnvOffset;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

void accumulate_feature(std::string_view feature, std::vector<double>& acc) {
  uint64_t h = fnv1a64(feature);
  size_t bucket = h % acc.size();
  acc[bucket] += (h >> 63) ? -1.0 : 1.0;
}

}  // namespace

Vector hash_embed(std::string_view text, size_t dim) {
  if (dim < 8) throw ValidationError("hash_embed: dim must be >= 8");
  Vector acc(dim, 0.0);
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    accumulate_feature(token, acc);
    for (size_t n = 3; n <= 5; ++n)
      if (token.size() >= n)
        for (size_t i = 0; i + n <= token.size(); ++i)
          accumulate_feature(std::string_view(token).substr(i, n), acc);
    token.clear();
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c))
      token += static_cast<char>(std::tolower(c));
    else
      flush();
  }
  flush();
  l2_normalize(acc);
  return acc;
}

EmbeddingTable load_embedding_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding table: " + path);
  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("key") ||
        !rec["key"].is_string() || !rec.contains("vector") || !rec["vector"].is_array())
      throw ValidationError("embedding table line " + std::to_string(line_no) +
                            ": expected {\"key\": string, \"vector\": [numbers]}");
    std::string key = rec["key"].get<std::string>();
    Vector vec;
    for (const auto& x : rec["vector"]) {
      if (!x.is_number())
        throw ValidationError("embedding table line " + std::to_string(line_no) +
                              ": non-numeric vector entry for key \"" + key + "\"");
      double v = x.get<double>();
      if (!std::isfinite(v))
        throw ValidationError("embedding table line " + std::to_string(line_no) +
                              ": non-finite vector entry for key \"" + key + "\"");
      vec.push_back(v);
    }
    if (table.entries.empty()) {
      table.dim = vec.size();
    } else if (vec.size() != table.dim) {
      throw ValidationError("embedding table: dimension mismatch at key \"" + key + "\" (" +
                            std::to_string(vec.size()) + " vs " + std::to_string(table.dim) +
                            ")");
    }
    if (!table.entries.emplace(std::move(key), std::move(vec)).second)
      throw ValidationError("embedding table: duplicate key \"" +
                            rec["key"].get<std::string>() + "\"");
  }
  if (table.dim == 0) throw ValidationError("embedding table is empty: " + path);
  return table;
}

HashEmbedder::HashEmbedder(size_t dim) : dim_(dim) {
  if (dim < 8) throw ValidationError("HashEmbedder: dim must be >= 8");
}

Vector HashEmbedder::embed(const Utterance& u, TextField field) const {
  if (field == TextField::Sentence) return hash_embed(u.text, dim_);
  if (!u.verb_object)
    throw ValidationError("embed: utterance \"" + u.key() + "\" has no verb_object pair");
  return hash_embed(u.verb_object->text(), dim_);
}

std::optional<Vector> HashEmbedder::embed_text(const std::string& text) const {
  return hash_embed(text, dim_);
}

TableEmbedder::TableEmbedder(EmbeddingTable table) : table_(std::move(table)) {}

Vector TableEmbedder::embed(const Utterance& u, TextField field) const {
  if (field == TextField::VerbObject) {
    if (!u.verb_object)
      throw ValidationError("embed: utterance \"" + u.key() + "\" has no verb_object pair");
    std::string key = "text:" + u.verb_object->text();
    auto it = table_.entries.find(key);
    if (it == table_.entries.end())
      throw ValidationError("embed: no embedding for key \"" + key + "\"");
    return it->second;
  }
  auto it = table_.entries.find(u.key());
  if (it == table_.entries.end()) it = table_.entries.find("text:" + u.text);
  if (it == table_.entries.end())
    throw ValidationError("embed: no embedding for key \"" + u.key() + "\"");
  return it->second;
}

std::optional<Vector> TableEmbedder::embed_text(const std::string& text) const {
  auto it = table_.entries.find("text:" + text);
  if (it == table_.entries.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix embed_all(const std::vector<Utterance>& utterances, const Embedder& embedder,
                          TextField field) {
  if (field == TextField::VerbObject) {
    std::string offenders;
    for (const Utterance& u : utterances)
      if (!u.verb_object) offenders += (offenders.empty() ? "" : ", ") + u.key();
    if (!offenders.empty())
      throw ValidationError("embed_all: verb_object field requested but missing on: " +
                            offenders);
  }

  EmbeddingMatrix X(utterances.size(), embedder.dim());
  std::vector<std::string> errors(utterances.size());
  const int64_t n = static_cast<int64_t>(utterances.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    try {
      Vector v = embedder.embed(utterances[i], field);
      std::copy(v.begin(), v.end(), X.row(i).begin());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw ValidationError(err);
  return X;
}

}  // namespace intentforge
