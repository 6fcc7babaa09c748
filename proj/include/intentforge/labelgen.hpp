// intentforge/labelgen.hpp
//
// Verb-Object cluster naming. Raw VO pairs are counted per cluster; when
// the top two counts are within a factor alpha of each other the object
// word is promoted along its hypernym chain (1 and 2 hops) and the most
// common pair of the expanded multiset wins. Only objects are promoted,
// never verbs.

#ifndef INTENTFORGE_LABELGEN_HPP
#define INTENTFORGE_LABELGEN_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "intentforge/corpus.hpp"

namespace intentforge {

// Single-parent hypernym chains, lowercase, acyclic.
struct HypernymLexicon {
  std::unordered_map<std::string, std::string> parent;
  bool empty() const { return parent.empty(); }
};

// Tab-separated "word<TAB>hypernym" edges. Rejects cyclic chains and
// conflicting parents for one word.
HypernymLexicon load_hypernym_lexicon(const std::string& path);

// Ordered so that iteration (and therefore every tie-break) is
// deterministic.
using VoCounts = std::map<VerbObject, long long>;

struct VoCountResult {
  VoCounts counts;
  long long support = 0;  // members that carried a VO pair
};

VoCountResult count_vo(const std::vector<Utterance>& members);

// Expanded multiset: every raw pair (v, o) with count c also contributes c
// to (v, hyper(o)) and (v, hyper^2(o)) where those exist. min_hops records
// the smallest hop count that produced each pair (raw = 0).
struct ExpandedCounts {
  VoCounts counts;
  std::map<VerbObject, int> min_hops;
};

ExpandedCounts expand_hypernyms(const VoCounts& raw, const HypernymLexicon& lexicon,
                                int max_hops = 2);

struct LabelerConfig {
  double alpha = 2.0;
  int max_hops = 2;
};

struct LabeledCluster {
  int cluster_id = 0;
  VerbObject label;
  std::vector<std::pair<VerbObject, long long>> top3;  // counts non-increasing
  bool used_hypernym = false;
  long long support = 0;
};

// Labels one cluster. Hypernym promotion fires when c1 <= alpha * c2 on
// the raw top-2 counts; ties in the selected multiset prefer fewer hops,
// then lexicographic (verb, object). Empty counts yield the documented
// ("unknown", "unknown") sentinel.
LabeledCluster generate_label(const VoCounts& raw, const HypernymLexicon& lexicon,
                              const LabelerConfig& cfg, int cluster_id = 0,
                              long long support = 0);

}  // namespace intentforge

#endif  // INTENTFORGE_LABELGEN_HPP
