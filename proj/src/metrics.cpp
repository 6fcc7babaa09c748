// src/metrics.cpp

#include "intentforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "intentforge/error.hpp"

namespace intentforge {

ContingencyTable contingency(const std::vector<int>& pred, const std::vector<int>& gold) {
  if (pred.size() != gold.size())
    throw ValidationError("contingency: pred and gold differ in length");
  if (pred.empty()) throw ValidationError("contingency: empty input");
  for (int id : pred)
    if (id < 0) throw ValidationError("contingency: negative pred id");
  for (int id : gold)
    if (id < 0) throw ValidationError("contingency: negative gold id");

  ContingencyTable t;
  std::set<int> pset(pred.begin(), pred.end()), gset(gold.begin(), gold.end());
  t.pred_ids.assign(pset.begin(), pset.end());
  t.gold_ids.assign(gset.begin(), gset.end());
  t.rows = t.pred_ids.size();
  t.cols = t.gold_ids.size();
  t.n = static_cast<long long>(pred.size());

  std::map<int, size_t> pidx, gidx;
  for (size_t i = 0; i < t.pred_ids.size(); ++i) pidx[t.pred_ids[i]] = i;
  for (size_t i = 0; i < t.gold_ids.size(); ++i) gidx[t.gold_ids[i]] = i;

  t.counts.assign(t.rows * t.cols, 0);
  for (size_t i = 0; i < pred.size(); ++i)
    ++t.counts[pidx[pred[i]] * t.cols + gidx[gold[i]]];
  return t;
}

namespace {

// O(n^3) Hungarian algorithm with potentials; returns the minimal total
// cost of a perfect matching on a square cost matrix.
double hungarian_min_value(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
  return total;
}

// Maximum-profit perfect matching value on a square profit matrix.
double square_max_value(const std::vector<std::vector<double>>& profit) {
  const size_t n = profit.size();
  if (n == 0) return 0.0;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) cost[i][j] = -profit[i][j];
  return -hungarian_min_value(cost);
}

}  // namespace

Assignment hungarian_max(const std::vector<std::vector<double>>& profit) {
  const size_t R = profit.size();
  if (R == 0) return {};
  const size_t C = profit[0].size();
  for (const auto& row : profit) {
    if (row.size() != C) throw ValidationError("hungarian_max: ragged profit matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw ValidationError("hungarian_max: non-finite profit");
  }
  if (C == 0) return {.row_to_col = std::vector<int>(R, -1), .total = 0.0};

  const size_t n = std::max(R, C);  // pad with zero rows/columns
  auto padded = [&](size_t r, size_t c) -> double {
    return (r < R && c < C) ? profit[r][c] : 0.0;
  };

  // optimal total over the padded square problem
  std::vector<std::vector<double>> full(n, std::vector<double>(n, 0.0));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) full[r][c] = padded(r, c);
  const double best_total = square_max_value(full);
  const double eps = 1e-9 * std::max(1.0, std::abs(best_total));

  // Fix original rows one at a time to the smallest column that still
  // reaches the optimum; unassigned (a padded column) ranks after every
  // real column. This pins the lexicographically smallest optimal
  // assignment vector.
  Assignment out;
  out.row_to_col.assign(R, -1);
  std::vector<char> col_used(n, 0);
  double fixed_profit = 0.0;

  for (size_t r = 0; r < R; ++r) {
    std::vector<size_t> candidates;
    for (size_t c = 0; c < C; ++c)
      if (!col_used[c]) candidates.push_back(c);
    for (size_t c = C; c < n; ++c) {
      if (!col_used[c]) {
        candidates.push_back(c);  // one padded column stands for "none"
        break;
      }
    }
    size_t chosen = candidates.back();
    double chosen_value = -std::numeric_limits<double>::infinity();
    for (size_t c : candidates) {
      // value of the subproblem on the remaining rows and columns
      std::vector<size_t> rows_left, cols_left;
      for (size_t rr = r + 1; rr < n; ++rr) rows_left.push_back(rr);
      for (size_t cc = 0; cc < n; ++cc)
        if (!col_used[cc] && cc != c) cols_left.push_back(cc);
      std::vector<std::vector<double>> sub(rows_left.size(),
                                           std::vector<double>(cols_left.size(), 0.0));
      for (size_t a = 0; a < rows_left.size(); ++a)
        for (size_t b = 0; b < cols_left.size(); ++b)
          sub[a][b] = padded(rows_left[a], cols_left[b]);
      double value = fixed_profit + padded(r, c) + square_max_value(sub);
      if (value >= best_total - eps) {
        chosen = c;
        break;
      }
      if (value > chosen_value) {  // numeric fallback, unreachable for exact inputs
        chosen_value = value;
        chosen = c;
      }
    }
    col_used[chosen] = 1;
    fixed_profit += padded(r, chosen);
    out.row_to_col[r] = chosen < C ? static_cast<int>(chosen) : -1;
  }
  out.total = fixed_profit;
  return out;
}

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double nmi(const std::vector<int>& pred, const std::vector<int>& gold, NmiNorm norm) {
  ContingencyTable t = contingency(pred, gold);
  const double n = static_cast<double>(t.n);

  std::vector<long long> row_sum(t.rows, 0), col_sum(t.cols, 0);
  for (size_t r = 0; r < t.rows; ++r)
    for (size_t c = 0; c < t.cols; ++c) {
      row_sum[r] += t.at(r, c);
      col_sum[c] += t.at(r, c);
    }

  double hu = 0.0, hv = 0.0;
  for (long long s : row_sum) hu -= xlogx(static_cast<double>(s) / n);
  for (long long s : col_sum) hv -= xlogx(static_cast<double>(s) / n);

  if (hu <= 0.0 && hv <= 0.0) return 1.0;
  if (hu <= 0.0 || hv <= 0.0) return 0.0;

  double mi = 0.0;
  for (size_t r = 0; r < t.rows; ++r)
    for (size_t c = 0; c < t.cols; ++c) {
      long long cnt = t.at(r, c);
      if (cnt == 0) continue;
      double p = static_cast<double>(cnt) / n;
      mi += p * std::log(static_cast<double>(cnt) * n /
                         (static_cast<double>(row_sum[r]) * static_cast<double>(col_sum[c])));
    }

  double denom = norm == NmiNorm::Arithmetic ? 0.5 * (hu + hv) : std::sqrt(hu * hv);
  double value = mi / denom;
  return std::clamp(value, 0.0, 1.0);
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& gold) {
  ContingencyTable t = contingency(pred, gold);
  std::vector<std::vector<double>> profit(t.rows, std::vector<double>(t.cols, 0.0));
  for (size_t r = 0; r < t.rows; ++r)
    for (size_t c = 0; c < t.cols; ++c) profit[r][c] = static_cast<double>(t.at(r, c));
  Assignment a = hungarian_max(profit);
  long long matched = 0;
  for (size_t r = 0; r < t.rows; ++r)
    if (a.row_to_col[r] >= 0) matched += t.at(r, a.row_to_col[r]);
  return static_cast<double>(matched) / static_cast<double>(t.n);
}

double precision_majority(const std::vector<int>& pred, const std::vector<int>& gold) {
  ContingencyTable t = contingency(pred, gold);
  long long correct = 0;
  for (size_t r = 0; r < t.rows; ++r) {
    long long best = -1;
    for (size_t c = 0; c < t.cols; ++c)
      if (t.at(r, c) > best) best = t.at(r, c);  // first max = smallest gold id
    correct += best;
  }
  return static_cast<double>(correct) / static_cast<double>(t.n);
}

EvalReport evaluate(const std::vector<int>& pred, const std::vector<std::string>& gold_names,
                    NmiNorm norm) {
  if (pred.size() != gold_names.size())
    throw ValidationError("evaluate: pred and gold differ in length");
  if (pred.empty()) throw ValidationError("evaluate: empty input");

  std::set<std::string> names(gold_names.begin(), gold_names.end());
  std::vector<std::string> name_list(names.begin(), names.end());
  std::map<std::string, int> name_to_id;
  for (size_t i = 0; i < name_list.size(); ++i) name_to_id[name_list[i]] = static_cast<int>(i);
  std::vector<int> gold(gold_names.size());
  for (size_t i = 0; i < gold_names.size(); ++i) gold[i] = name_to_id[gold_names[i]];

  EvalReport report;
  report.n = static_cast<long long>(pred.size());
  report.nmi = nmi(pred, gold, norm);
  report.accuracy = accuracy(pred, gold);
  report.precision = precision_majority(pred, gold);

  ContingencyTable t = contingency(pred, gold);
  report.k_predicted = static_cast<int>(t.rows);
  report.k_gold = static_cast<int>(t.cols);
  std::vector<std::vector<double>> profit(t.rows, std::vector<double>(t.cols, 0.0));
  for (size_t r = 0; r < t.rows; ++r)
    for (size_t c = 0; c < t.cols; ++c) profit[r][c] = static_cast<double>(t.at(r, c));
  Assignment a = hungarian_max(profit);
  for (size_t r = 0; r < t.rows; ++r)
    if (a.row_to_col[r] >= 0)
      report.mapping.emplace_back(t.pred_ids[r], name_list[t.gold_ids[a.row_to_col[r]]]);
  return report;
}

}  // namespace intentforge
