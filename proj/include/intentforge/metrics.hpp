// intentforge/metrics.hpp
//
// Cluster-vs-gold evaluation: contingency counts, optimal 1:1 alignment
// (Hungarian algorithm), NMI, aligned accuracy and majority-mapping
// precision. All functions are pure.

#ifndef INTENTFORGE_METRICS_HPP
#define INTENTFORGE_METRICS_HPP

#include <string>
#include <vector>

namespace intentforge {

// Dense contingency table over the ids actually observed. pred_ids and
// gold_ids map dense row/column indexes back to the original ids, in
// ascending order.
struct ContingencyTable {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<long long> counts;  // rows x cols, row-major
  long long n = 0;
  std::vector<int> pred_ids;
  std::vector<int> gold_ids;

  long long at(size_t r, size_t c) const { return counts[r * cols + c]; }
};

ContingencyTable contingency(const std::vector<int>& pred, const std::vector<int>& gold);

// Maximum-profit injective assignment of min(R, C) rows to columns.
// row_to_col[r] is the assigned column or -1. Among optima, returns the
// lexicographically smallest row_to_col with unassigned (-1) ordered after
// every real column.
struct Assignment {
  std::vector<int> row_to_col;
  double total = 0.0;
};

Assignment hungarian_max(const std::vector<std::vector<double>>& profit);

enum class NmiNorm { Arithmetic, Sqrt };

// I(U;V) normalized by the mean of H(U) and H(V), natural logs.
// Conventions: 0*log 0 = 0; both entropies zero -> 1; exactly one zero -> 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& gold,
           NmiNorm norm = NmiNorm::Arithmetic);

// Fraction of points covered by the optimal 1:1 cluster-to-intent
// alignment; clusters left unmatched contribute nothing.
double accuracy(const std::vector<int>& pred, const std::vector<int>& gold);

// Each cluster maps (many-to-one) to its most frequent gold intent, ties
// to the smallest intent id; precision is the fraction of points whose
// intent equals their cluster's mapped intent. Always >= accuracy.
double precision_majority(const std::vector<int>& pred, const std::vector<int>& gold);

struct EvalReport {
  double nmi = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  // Injective cluster id -> intent name from the Hungarian alignment.
  std::vector<std::pair<int, std::string>> mapping;
  int k_predicted = 0;
  int k_gold = 0;
  long long n = 0;  // points evaluated (the gold-bearing subset)
};

// Full report for integer cluster ids against gold intent names. Intent
// names are mapped to column ids in lexicographic order, which also pins
// the majority-mapping tie-break.
EvalReport evaluate(const std::vector<int>& pred, const std::vector<std::string>& gold_names,
                    NmiNorm norm = NmiNorm::Arithmetic);

}  // namespace intentforge

#endif  // INTENTFORGE_METRICS_HPP
