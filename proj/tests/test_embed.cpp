// tests/test_embed.cpp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "intentforge/embed.hpp"
#include "intentforge/error.hpp"
#include "intentforge/reference.hpp"
#include "intentforge/rng.hpp"
#include "testutil.hpp"

using namespace intentforge;
using testutil::make_utterance;
using testutil::write_temp;

namespace {

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("l2_normalize basics") {
  Vector v{3.0, 4.0};
  l2_normalize(v);
  CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-14));

  Vector zero{0.0, 0.0, 0.0};
  l2_normalize(zero);
  CHECK(zero == Vector{0.0, 0.0, 0.0});

  Vector unit{1.0, 0.0};
  Vector again = l2_normalized(unit);
  CHECK(again == unit);
}

TEST_CASE("l2_normalize norm property on random vectors") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Vector v(1 + rng.uniform_below(32));
    for (double& x : v) x = rng.gaussian() * std::pow(10.0, (int)rng.uniform_below(6) - 3);
    Vector n = l2_normalized(v);
    double len = norm(n);
    CHECK((len == 0.0 || std::abs(len - 1.0) < 1e-12));
  }
}

TEST_CASE("hash_embed determinism, empty text, unit norm") {
  Vector a = hash_embed("pay bill", 64);
  Vector b = hash_embed("pay bill", 64);
  CHECK(a == b);

  Vector empty = hash_embed("", 64);
  CHECK(norm(empty) == 0.0);

  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  CHECK(std::abs(dot - 1.0) < 1e-12);

  CHECK_THROWS_AS(hash_embed("x", 4), ValidationError);
}

// Pinned stability fixture: these ten vectors must never change. If this
// test fails the featurizer is no longer bit-compatible with previously
// exported embeddings and reports.
TEST_CASE("hash_embed pinned fixture (dim 16, first 8 components)") {
  struct Pinned {
    const char* text;
    double first8[8];
  };
  const Pinned fixture[10] = {
      {"pay bill",
       {0, 0, 0, 0, 0, 0, 0, 0}},
      {"check balance",
       {0.31622776601683794, -0.15811388300841897, 0, -0.31622776601683794,
        -0.15811388300841897, 0, -0.31622776601683794, -0.63245553203367588}},
      {"i need to check my balance",
       {0.29172998299578912, -0.29172998299578912, 0, -0.14586499149789456,
        -0.14586499149789456, 0, -0.29172998299578912, -0.58345996599157823}},
      {"add my son",
       {0, 0, 0, 0.33333333333333331, -0.66666666666666663, 0, 0, 0}},
      {"cancel the policy",
       {0, 0, -0.42640143271122083, 0, 0.42640143271122083, 0, 0.21320071635561041,
        -0.21320071635561041}},
      {"Transfer Money!",
       {0.3779644730092272, 0, 0, 0, 0, 0, 0.3779644730092272, -0.3779644730092272}},
      {"open a new checking account",
       {0.11470786693528087, 0.22941573387056174, 0, -0.11470786693528087,
        -0.22941573387056174, 0.11470786693528087, -0.57353933467640439,
        -0.22941573387056174}},
      {"find branch",
       {0, 0, 0, 0, 0, -0.35355339059327373, 0, 0}},
      {"report an accident",
       {0, -0.19245008972987526, 0, -0.19245008972987526, 0, 0.19245008972987526,
        0.19245008972987526, -0.19245008972987526}},
      {"change my address please",
       {-0.23570226039551587, 0.23570226039551587, -0.70710678118654757,
        -0.23570226039551587, 0.23570226039551587, 0.23570226039551587,
        0.23570226039551587, 0}},
  };
  for (const Pinned& p : fixture) {
    Vector v = hash_embed(p.text, 16);
    for (int i = 0; i < 8; ++i) {
      INFO(p.text, " component ", i);
      CHECK(v[static_cast<size_t>(i)] == p.first8[i]);
    }
  }
}

TEST_CASE("load_embedding_table validates dimensions and duplicates") {
  auto good = write_temp("table_good.jsonl",
                         R"({"key":"d0:0","vector":[1,0,0,0]}
{"key":"d0:1","vector":[0,1,0,0]}
{"key":"text:pay bill","vector":[0,0,1,0]}
)");
  EmbeddingTable t = load_embedding_table(good);
  CHECK(t.dim == 4);
  CHECK(t.entries.size() == 3);

  auto mismatch = write_temp("table_dim.jsonl",
                             R"({"key":"a","vector":[1,0,0,0]}
{"key":"b","vector":[1,0,0,0,0]}
)");
  try {
    load_embedding_table(mismatch);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("\"b\"") != std::string::npos);
  }

  auto dup = write_temp("table_dup.jsonl",
                        R"({"key":"a","vector":[1,0,0,0]}
{"key":"a","vector":[0,1,0,0]}
)");
  CHECK_THROWS_AS(load_embedding_table(dup), ValidationError);
}

TEST_CASE("embed_all over both fields") {
  std::vector<Utterance> utts;
  utts.push_back(make_utterance("d", 0, Speaker::Customer, {"InformIntent"}, "pay my bill"));
  utts.push_back(make_utterance("d", 1, Speaker::Customer, {"InformIntent"}, "pay my bill"));
  utts[0].verb_object = VerbObject{"pay", "bill"};

  HashEmbedder embedder(32);
  EmbeddingMatrix X = embed_all(utts, embedder, TextField::Sentence);
  CHECK(X.n == 2);
  CHECK(X.dim == 32);
  // identical texts embed to identical rows
  for (size_t d = 0; d < X.dim; ++d) CHECK(X.row(0)[d] == X.row(1)[d]);

  // missing VO pair is rejected with the offender named
  try {
    embed_all(utts, embedder, TextField::VerbObject);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("d:1") != std::string::npos);
  }
}

TEST_CASE("embed_all with a table names missing keys") {
  auto path = write_temp("table_partial.jsonl", R"({"key":"d:0","vector":[1,0,0,0,0,0,0,0]}
)");
  TableEmbedder embedder(load_embedding_table(path));
  std::vector<Utterance> utts;
  utts.push_back(make_utterance("d", 0, Speaker::Customer, {}, "hello"));
  utts.push_back(make_utterance("d", 1, Speaker::Customer, {}, "missing"));
  try {
    embed_all(utts, embedder, TextField::Sentence);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("d:1") != std::string::npos);
  }
}

TEST_CASE("parallel embed_all matches the serial reference") {
  std::vector<Utterance> utts;
  for (int i = 0; i < 97; ++i)
    utts.push_back(make_utterance("d", i, Speaker::Customer, {"InformIntent"},
                                  "utterance number " + std::to_string(i * 37)));
  HashEmbedder embedder(64);
  EmbeddingMatrix parallel = embed_all(utts, embedder, TextField::Sentence);
  EmbeddingMatrix serial = ref::embed_all(utts, embedder, TextField::Sentence);
  REQUIRE(parallel.data.size() == serial.data.size());
  for (size_t i = 0; i < parallel.data.size(); ++i) CHECK(parallel.data[i] == serial.data[i]);
}
