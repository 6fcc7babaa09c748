// src/labelgen.cpp

#include "intentforge/labelgen.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "intentforge/error.hpp"

namespace intentforge {

HypernymLexicon load_hypernym_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open hypernym lexicon: " + path);
  HypernymLexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw ValidationError("hypernym lexicon line " + std::to_string(line_no) +
                            ": expected \"word<TAB>hypernym\"");
    std::string word = fold_case(line.substr(0, tab));
    std::string hyper = fold_case(line.substr(tab + 1));
    auto it = lex.parent.find(word);
    if (it != lex.parent.end() && it->second != hyper)
      throw ValidationError("hypernym lexicon line " + std::to_string(line_no) +
                            ": conflicting parent for \"" + word + "\"");
    lex.parent[word] = hyper;
  }
  // chains must be acyclic
  for (const auto& [start, unused] : lex.parent) {
    std::unordered_set<std::string> seen{start};
    std::string cur = start;
    while (true) {
      auto it = lex.parent.find(cur);
      if (it == lex.parent.end()) break;
      cur = it->second;
      if (!seen.insert(cur).second)
        throw ValidationError("hypernym lexicon: cycle through \"" + cur + "\"");
    }
  }
  return lex;
}

VoCountResult count_vo(const std::vector<Utterance>& members) {
  VoCountResult result;
  for (const Utterance& u : members) {
    if (!u.verb_object) continue;
    VerbObject pair{fold_case(u.verb_object->verb), fold_case(u.verb_object->object)};
    ++result.counts[pair];
    ++result.support;
  }
  return result;
}

ExpandedCounts expand_hypernyms(const VoCounts& raw, const HypernymLexicon& lexicon,
                                int max_hops) {
  ExpandedCounts out;
  for (const auto& [pair, count] : raw) {
    out.counts[pair] += count;
    auto it = out.min_hops.find(pair);
    if (it == out.min_hops.end() || it->second > 0) out.min_hops[pair] = 0;

    std::unordered_set<std::string> seen{pair.object};
    std::string word = pair.object;
    for (int hop = 1; hop <= max_hops; ++hop) {
      auto parent = lexicon.parent.find(word);
      if (parent == lexicon.parent.end()) break;
      word = parent->second;
      if (!seen.insert(word).second)
        throw ValidationError("expand_hypernyms: cycle through \"" + word + "\"");
      VerbObject promoted{pair.verb, word};
      out.counts[promoted] += count;
      auto mh = out.min_hops.find(promoted);
      if (mh == out.min_hops.end() || mh->second > hop) out.min_hops[promoted] = hop;
    }
  }
  return out;
}

namespace {

struct RankedPair {
  VerbObject pair;
  long long count;
  int hops;
};

// Total order for label selection: count desc, then fewer hops, then
// lexicographic (verb, object).
bool ranked_before(const RankedPair& a, const RankedPair& b) {
  if (a.count != b.count) return a.count > b.count;
  if (a.hops != b.hops) return a.hops < b.hops;
  return a.pair < b.pair;
}

}  // namespace

LabeledCluster generate_label(const VoCounts& raw, const HypernymLexicon& lexicon,
                              const LabelerConfig& cfg, int cluster_id, long long support) {
  if (cfg.alpha < 1.0) throw ValidationError("generate_label: alpha must be >= 1");

  LabeledCluster out;
  out.cluster_id = cluster_id;
  out.support = support;
  if (raw.empty()) {
    out.label = VerbObject{"unknown", "unknown"};  // documented sentinel
    out.used_hypernym = false;
    return out;
  }

  // top-2 raw counts decide whether to promote
  long long c1 = 0, c2 = 0;
  for (const auto& [pair, count] : raw) {
    if (count >= c1) {
      c2 = c1;
      c1 = count;
    } else if (count > c2) {
      c2 = count;
    }
  }

  std::vector<RankedPair> ranked;
  if (static_cast<double>(c1) > cfg.alpha * static_cast<double>(c2)) {
    out.used_hypernym = false;
    for (const auto& [pair, count] : raw) ranked.push_back({pair, count, 0});
  } else {
    out.used_hypernym = true;
    ExpandedCounts expanded = expand_hypernyms(raw, lexicon, cfg.max_hops);
    for (const auto& [pair, count] : expanded.counts)
      ranked.push_back({pair, count, expanded.min_hops.at(pair)});
  }

  std::sort(ranked.begin(), ranked.end(), ranked_before);
  out.label = ranked[0].pair;
  for (size_t i = 0; i < ranked.size() && i < 3; ++i)
    out.top3.emplace_back(ranked[i].pair, ranked[i].count);
  return out;
}

}  // namespace intentforge
