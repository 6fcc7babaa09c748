// tests/test_metrics.cpp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "intentforge/error.hpp"
#include "intentforge/metrics.hpp"
#include "intentforge/rng.hpp"
#include "oracles.hpp"

using namespace intentforge;

namespace {

std::vector<std::vector<double>> random_profit(size_t R, size_t C, int max_value, Rng& rng) {
  std::vector<std::vector<double>> m(R, std::vector<double>(C));
  for (auto& row : m)
    for (double& v : row) v = static_cast<double>(rng.uniform_below(max_value + 1));
  return m;
}

std::vector<int> relabel(const std::vector<int>& ids, Rng& rng) {
  int max_id = *std::max_element(ids.begin(), ids.end());
  std::vector<int> perm(max_id + 1);
  for (int i = 0; i <= max_id; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<int> out(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) out[i] = perm[ids[i]];
  return out;
}

}  // namespace

TEST_CASE("contingency counts and errors") {
  ContingencyTable t = contingency({0, 0, 1}, {0, 0, 1});
  CHECK(t.rows == 2);
  CHECK(t.cols == 2);
  CHECK(t.at(0, 0) == 2);
  CHECK(t.at(0, 1) == 0);
  CHECK(t.at(1, 0) == 0);
  CHECK(t.at(1, 1) == 1);

  CHECK_THROWS_AS(contingency({}, {}), ValidationError);
  CHECK_THROWS_AS(contingency({0, 1}, {0}), ValidationError);

  // permutation of items leaves counts unchanged
  ContingencyTable p = contingency({1, 0, 0}, {1, 0, 0});
  CHECK(p.counts == t.counts);
}

TEST_CASE("hungarian_max hand cases") {
  Assignment id3 = hungarian_max({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(id3.total == 3.0);
  CHECK(id3.row_to_col == std::vector<int>{0, 1, 2});

  Assignment swap = hungarian_max({{1, 2}, {2, 1}});
  CHECK(swap.total == 4.0);
  CHECK(swap.row_to_col == std::vector<int>{1, 0});

  // all-equal matrix: ties resolve to the identity assignment
  Assignment flat = hungarian_max({{5, 5}, {5, 5}});
  CHECK(flat.total == 10.0);
  CHECK(flat.row_to_col == std::vector<int>{0, 1});
}

TEST_CASE("hungarian_max rectangular padding") {
  // more rows than columns: exactly C rows assigned, rest unmatched
  Assignment tall = hungarian_max({{3, 0}, {2, 2}, {0, 3}});
  CHECK(tall.total == 6.0);
  int assigned = 0;
  for (int c : tall.row_to_col) assigned += (c >= 0);
  CHECK(assigned == 2);
  CHECK(tall.row_to_col == std::vector<int>{0, -1, 1});

  // more columns than rows: every row assigned
  Assignment wide = hungarian_max({{0, 5, 1}});
  CHECK(wide.total == 5.0);
  CHECK(wide.row_to_col == std::vector<int>{1});
}

TEST_CASE("hungarian_max equals brute force with identical tie-breaks") {
  Rng rng(606);
  for (int trial = 0; trial < 120; ++trial) {
    size_t R = 1 + rng.uniform_below(7);
    size_t C = 1 + rng.uniform_below(7);
    // small values force frequent ties, stressing the lexicographic rule
    auto profit = random_profit(R, C, trial % 3 == 0 ? 2 : 20, rng);
    Assignment fast = hungarian_max(profit);
    auto brute = oracles::brute_force_assignment(profit);
    CHECK(fast.total == brute.total);
    CHECK(fast.row_to_col == brute.row_to_col);
  }
}

TEST_CASE("nmi identities and conventions") {
  CHECK(nmi({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nmi({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.0);  // independent partitions

  // single cluster on both sides: zero entropies -> 1
  CHECK(nmi({0, 0, 0}, {2, 2, 2}) == 1.0);
  // one side degenerate -> 0
  CHECK(nmi({0, 0, 0}, {0, 1, 0}) == 0.0);
  CHECK(nmi({0, 1, 0}, {5, 5, 5}) == 0.0);

  // direct entropy computation as the oracle for a mixed case
  const double n = 4.0;
  double hu = -(0.5 * std::log(0.5) + 0.5 * std::log(0.5));
  double hv = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  double mi = (2.0 / n) * std::log((2.0 / n) / (0.5 * 0.75)) +
              (1.0 / n) * std::log((1.0 / n) / (0.5 * 0.75)) +
              (1.0 / n) * std::log((1.0 / n) / (0.5 * 0.25));
  double expected = mi / (0.5 * (hu + hv));
  CHECK(nmi({0, 0, 1, 1}, {0, 0, 0, 1}) == doctest::Approx(expected).epsilon(1e-12));

  // sqrt normalization variant
  double expected_sqrt = mi / std::sqrt(hu * hv);
  CHECK(nmi({0, 0, 1, 1}, {0, 0, 0, 1}, NmiNorm::Sqrt) ==
        doctest::Approx(expected_sqrt).epsilon(1e-12));
}

TEST_CASE("accuracy hand cases") {
  CHECK(accuracy({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  CHECK(accuracy({0, 0, 1, 1, 2}, {0, 0, 1, 1, 1}) == doctest::Approx(0.8).epsilon(1e-15));
  // one predicted cluster over two equal gold classes
  CHECK(accuracy({0, 0, 0, 0}, {0, 0, 1, 1}) == 0.5);
}

TEST_CASE("precision_majority hand cases") {
  CHECK(precision_majority({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  // clusters 1 and 2 both map to gold 1
  CHECK(precision_majority({0, 0, 1, 1, 2}, {0, 0, 1, 1, 1}) == 1.0);
  // one cluster with 3 of gold A and 1 of gold B
  CHECK(precision_majority({0, 0, 0, 0}, {0, 0, 0, 1}) == 0.75);
}

TEST_CASE("metric invariants on random labelings") {
  Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 4 + rng.uniform_below(40);
    int kp = 1 + static_cast<int>(rng.uniform_below(6));
    int kg = 1 + static_cast<int>(rng.uniform_below(6));
    std::vector<int> pred(n), gold(n);
    for (size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.uniform_below(kp));
      gold[i] = static_cast<int>(rng.uniform_below(kg));
    }

    double v_nmi = nmi(pred, gold);
    double v_acc = accuracy(pred, gold);
    double v_prec = precision_majority(pred, gold);

    CHECK(v_nmi >= 0.0);
    CHECK(v_nmi <= 1.0);
    CHECK(v_acc >= 0.0);
    CHECK(v_acc <= 1.0);
    CHECK(v_prec >= 0.0);
    CHECK(v_prec <= 1.0);
    CHECK(v_acc <= v_prec);  // 1:1 matching restricts many-to-one mapping

    // relabeling invariance on both sides
    std::vector<int> pred2 = relabel(pred, rng);
    std::vector<int> gold2 = relabel(gold, rng);
    CHECK(std::abs(nmi(pred2, gold2) - v_nmi) < 1e-12);
    CHECK(accuracy(pred2, gold2) == v_acc);
    CHECK(precision_majority(pred2, gold2) == v_prec);
  }
}

TEST_CASE("evaluate maps clusters to intent names") {
  std::vector<int> pred{0, 0, 1, 1, 2};
  std::vector<std::string> gold{"PayBill", "PayBill", "CheckBalance", "CheckBalance",
                                "CheckBalance"};
  EvalReport r = evaluate(pred, gold);
  CHECK(r.k_predicted == 3);
  CHECK(r.k_gold == 2);
  CHECK(r.accuracy == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.precision == 1.0);
  REQUIRE(r.mapping.size() == 2);
  CHECK(r.mapping[0] == std::pair<int, std::string>{0, "PayBill"});
  CHECK(r.mapping[1] == std::pair<int, std::string>{1, "CheckBalance"});
}
