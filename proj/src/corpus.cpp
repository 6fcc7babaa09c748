// src/corpus.cpp

#include "intentforge/corpus.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "intentforge/error.hpp"
#include "intentforge/rng.hpp"

namespace intentforge {

using nlohmann::json;

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void record_error(size_t line_no, const std::string& what) {
  throw ValidationError("corpus line " + std::to_string(line_no) + ": " + what);
}

const std::array<const char*, 7> kKnownFields = {
    "dialogue_id", "turn_id", "speaker", "dialogue_acts", "text", "verb_object", "gold_intent"};

Utterance parse_record(const json& rec, size_t line_no, bool strict) {
  if (!rec.is_object()) record_error(line_no, "record is not a JSON object");
  for (auto it = rec.begin(); it != rec.end(); ++it) {
    bool known = false;
    for (const char* f : kKnownFields)
      if (it.key() == f) known = true;
    if (!known) {
      if (strict) record_error(line_no, "unknown field \"" + it.key() + "\"");
      std::cerr << "warning: corpus line " << line_no << ": ignoring unknown field \""
                << it.key() << "\"\n";
    }
  }

  Utterance u;
  if (!rec.contains("dialogue_id") || !rec["dialogue_id"].is_string())
    record_error(line_no, "field \"dialogue_id\" missing or not a string");
  u.dialogue_id = rec["dialogue_id"].get<std::string>();

  if (!rec.contains("turn_id") || !rec["turn_id"].is_number_integer())
    record_error(line_no, "field \"turn_id\" missing or not an integer");
  long long tid = rec["turn_id"].get<long long>();
  if (tid < 0) record_error(line_no, "field \"turn_id\" is negative");
  u.turn_id = static_cast<int>(tid);

  if (!rec.contains("speaker") || !rec["speaker"].is_string())
    record_error(line_no, "field \"speaker\" missing or not a string");
  std::string spk = rec["speaker"].get<std::string>();
  if (spk == "Agent")
    u.speaker = Speaker::Agent;
  else if (spk == "Customer")
    u.speaker = Speaker::Customer;
  else
    record_error(line_no, "field \"speaker\" must be \"Agent\" or \"Customer\"");

  if (!rec.contains("dialogue_acts") || !rec["dialogue_acts"].is_array())
    record_error(line_no, "field \"dialogue_acts\" missing or not an array");
  for (const auto& act : rec["dialogue_acts"]) {
    if (!act.is_string()) record_error(line_no, "field \"dialogue_acts\" has a non-string entry");
    u.dialogue_acts.insert(act.get<std::string>());
  }

  if (!rec.contains("text") || !rec["text"].is_string())
    record_error(line_no, "field \"text\" missing or not a string");
  u.text = rec["text"].get<std::string>();
  if (trim(u.text).empty()) record_error(line_no, "field \"text\" is empty");

  if (rec.contains("verb_object") && !rec["verb_object"].is_null()) {
    const auto& vo = rec["verb_object"];
    if (!vo.is_array() || vo.size() != 2 || !vo[0].is_string() || !vo[1].is_string())
      record_error(line_no, "field \"verb_object\" must be null or [string, string]");
    VerbObject pair{fold_case(vo[0].get<std::string>()), fold_case(vo[1].get<std::string>())};
    if (pair.verb.empty() || pair.object.empty())
      record_error(line_no, "field \"verb_object\" has an empty component");
    u.verb_object = pair;
  }

  if (rec.contains("gold_intent") && !rec["gold_intent"].is_null()) {
    if (!rec["gold_intent"].is_string())
      record_error(line_no, "field \"gold_intent\" must be null or a string");
    u.gold_intent = rec["gold_intent"].get<std::string>();
  }
  return u;
}

}  // namespace

Corpus load_corpus(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path);

  Corpus corpus;
  corpus.name = path;
  std::unordered_set<std::string> seen_keys;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) record_error(line_no, "invalid JSON");
    Utterance u = parse_record(rec, line_no, strict);
    if (!seen_keys.insert(u.key()).second)
      record_error(line_no, "duplicate (dialogue_id, turn_id) key \"" + u.key() + "\"");
    if (u.gold_intent) corpus.intent_inventory.insert(*u.gold_intent);
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path);
  for (const Utterance& u : corpus.utterances) {
    json rec;
    rec["dialogue_id"] = u.dialogue_id;
    rec["turn_id"] = u.turn_id;
    rec["speaker"] = u.speaker == Speaker::Agent ? "Agent" : "Customer";
    rec["dialogue_acts"] = u.dialogue_acts;
    rec["text"] = u.text;
    if (u.verb_object)
      rec["verb_object"] = json::array({u.verb_object->verb, u.verb_object->object});
    else
      rec["verb_object"] = nullptr;
    if (u.gold_intent)
      rec["gold_intent"] = *u.gold_intent;
    else
      rec["gold_intent"] = nullptr;
    out << rec.dump() << "\n";
  }
}

std::vector<Utterance> select_intent_turns(const Corpus& corpus) {
  std::vector<Utterance> out;
  for (const Utterance& u : corpus.utterances)
    if (u.informs_intent()) out.push_back(u);
  return out;
}

namespace {

// Small pinned stopword list for the fallback extractor.
const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kStop = {
      "a",  "an",   "the",  "my",    "your", "our",  "his",   "her",  "its", "their",
      "this", "that", "these", "those", "to",  "of",   "for",  "in",   "on",  "at",
      "with", "about", "me",   "i",     "you",  "we",   "they", "it",   "please", "some",
      "any",  "and",  "or"};
  return kStop;
}

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

std::optional<VerbObject> extract_vo_fallback(const std::string& text,
                                              const std::set<std::string>& verb_lexicon) {
  if (verb_lexicon.empty()) throw ValidationError("extract_vo_fallback: empty verb lexicon");
  std::vector<std::string> tokens = tokenize_lower(text);
  size_t verb_pos = tokens.size();
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (verb_lexicon.count(tokens[i])) {
      verb_pos = i;
      break;
    }
  }
  if (verb_pos == tokens.size()) return std::nullopt;
  for (size_t i = verb_pos + 1; i < tokens.size(); ++i) {
    if (verb_lexicon.count(tokens[i])) continue;
    if (stopwords().count(tokens[i])) continue;
    return VerbObject{tokens[verb_pos], tokens[i]};
  }
  return std::nullopt;
}

namespace {

std::string render_template(const IntentTemplate& t) {
  std::string text = t.pattern;
  auto replace_all = [&text](const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("{verb}", t.verb);
  replace_all("{object}", t.object);
  return text;
}

}  // namespace

Corpus generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
  if (spec.intents.size() < 2)
    throw ValidationError("generate_synthetic: need at least 2 intents, got " +
                          std::to_string(spec.intents.size()));
  for (const SyntheticIntent& intent : spec.intents) {
    if (intent.templates.empty())
      throw ValidationError("generate_synthetic: intent \"" + intent.name + "\" has no templates");
    if (intent.count < 1)
      throw ValidationError("generate_synthetic: intent \"" + intent.name + "\" has count < 1");
  }

  Rng rng(seed);
  Corpus corpus;
  corpus.name = spec.corpus_name;
  size_t dialogue = 0;
  for (const SyntheticIntent& intent : spec.intents) {
    for (int i = 0; i < intent.count; ++i) {
      const IntentTemplate& t =
          intent.templates[rng.uniform_below(intent.templates.size())];
      Utterance u;
      u.dialogue_id = spec.corpus_name + "-d" + std::to_string(dialogue++);
      u.turn_id = 0;
      u.speaker = Speaker::Customer;
      u.dialogue_acts = {"InformIntent"};
      u.text = render_template(t);
      u.verb_object = VerbObject{fold_case(t.verb), fold_case(t.object)};
      u.gold_intent = intent.name;
      corpus.intent_inventory.insert(intent.name);
      corpus.utterances.push_back(std::move(u));
    }
  }
  return corpus;
}

}  // namespace intentforge
