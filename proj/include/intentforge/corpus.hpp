// intentforge/corpus.hpp
//
// Dialogue corpus data model: utterances with speaker roles, dialogue acts,
// optional Verb-Object pairs and optional gold intents. Corpora are loaded
// from JSONL files (one utterance object per line), are immutable after
// construction, and can be synthesized deterministically for tests.

#ifndef INTENTFORGE_CORPUS_HPP
#define INTENTFORGE_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace intentforge {

enum class Speaker { Agent, Customer };

// A verb and its direct object, always stored lowercase.
struct VerbObject {
  std::string verb;
  std::string object;

  bool operator==(const VerbObject&) const = default;
  auto operator<=>(const VerbObject&) const = default;

  // "verb object", the text form fed to embedders.
  std::string text() const { return verb + " " + object; }
  // "verb-object", the label form used in reports.
  std::string dashed() const { return verb + "-" + object; }
};

struct Utterance {
  std::string dialogue_id;
  int turn_id = 0;  // non-negative
  Speaker speaker = Speaker::Customer;
  std::set<std::string> dialogue_acts;
  std::string text;
  std::optional<VerbObject> verb_object;
  std::optional<std::string> gold_intent;

  bool operator==(const Utterance&) const = default;

  std::string key() const { return dialogue_id + ":" + std::to_string(turn_id); }
  bool informs_intent() const {
    return speaker == Speaker::Customer && dialogue_acts.count("InformIntent") > 0;
  }
};

struct Corpus {
  std::string name;
  std::vector<Utterance> utterances;
  // Exactly the set of non-null gold_intent values present.
  std::set<std::string> intent_inventory;

  bool operator==(const Corpus&) const = default;
};

// Loads a JSONL corpus. Each line must be an object with fields
// dialogue_id, turn_id, speaker, dialogue_acts, text and the nullable
// fields verb_object ([verb, object]) and gold_intent. Verb/object strings
// are lowercased on load. Malformed records raise ValidationError naming
// the line and field; duplicate (dialogue_id, turn_id) keys are rejected.
// In strict mode unknown fields are errors, otherwise they warn on stderr.
Corpus load_corpus(const std::string& path, bool strict = false);

// Writes the corpus in the same JSONL format load_corpus reads.
void write_corpus(const Corpus& corpus, const std::string& path);

// The clustering units: Customer turns carrying the InformIntent act,
// in corpus order.
std::vector<Utterance> select_intent_turns(const Corpus& corpus);

// Heuristic Verb-Object extraction: scans lowercased tokens left to right,
// takes the first token found in verb_lexicon as the verb and the next
// token that is neither a verb nor a stopword as the object. A degraded
// stand-in for dependency parsing, good enough for self-contained tests.
std::optional<VerbObject> extract_vo_fallback(const std::string& text,
                                              const std::set<std::string>& verb_lexicon);

// One way of phrasing an intent: the pattern may contain {verb} and
// {object} placeholders.
struct IntentTemplate {
  std::string verb;
  std::string object;
  std::string pattern;
};

struct SyntheticIntent {
  std::string name;
  std::vector<IntentTemplate> templates;  // at least one
  int count = 0;                          // utterances to generate, >= 1
};

struct SyntheticSpec {
  std::string corpus_name;
  std::vector<SyntheticIntent> intents;  // at least two
};

// Deterministic synthetic corpus: every utterance is a Customer
// InformIntent turn with gold_intent and verb_object filled in.
Corpus generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

// ASCII lowercase fold used everywhere strings are compared.
std::string fold_case(std::string_view s);

}  // namespace intentforge

#endif  // INTENTFORGE_CORPUS_HPP
