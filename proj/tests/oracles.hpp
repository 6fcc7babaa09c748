// tests/oracles.hpp
//
// Independent oracles used by the unit and acceptance suites. These are
// deliberately naive: brute-force enumeration and textbook formulas, kept
// separate from the library implementations they check.

#ifndef INTENTFORGE_TESTS_ORACLES_HPP
#define INTENTFORGE_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

struct BruteAssignment {
  std::vector<int> row_to_col;
  double total = -std::numeric_limits<double>::infinity();
};

// Exhaustive max-profit assignment of min(R, C) pairs, enumerating
// candidate vectors in lexicographic order (real columns ascending,
// then "unassigned") and keeping the first optimum. Matches the tie
// conventions promised by hungarian_max.
inline BruteAssignment brute_force_assignment(const std::vector<std::vector<double>>& profit) {
  const size_t R = profit.size();
  const size_t C = R == 0 ? 0 : profit[0].size();
  const size_t none_quota = R > C ? R - C : 0;

  BruteAssignment best;
  std::vector<int> current(R, -1);
  std::vector<char> used(C, 0);

  std::function<void(size_t, size_t, double)> recurse = [&](size_t row, size_t nones,
                                                            double sum) {
    if (row == R) {
      if (sum > best.total) {
        best.total = sum;
        best.row_to_col = current;
      }
      return;
    }
    for (size_t c = 0; c < C; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current[row] = static_cast<int>(c);
      recurse(row + 1, nones, sum + profit[row][c]);
      used[c] = 0;
    }
    if (nones < none_quota) {
      current[row] = -1;
      recurse(row + 1, nones + 1, sum);
    }
    current[row] = -1;
  };
  recurse(0, 0, 0.0);
  return best;
}

// Central finite difference of f along one coordinate of x.
inline double central_diff(const std::function<double()>& f, double& x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  double up = f();
  x = saved - h;
  double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

// Max absolute deviation between two gradients, relative to the larger
// gradient scale (so near-zero components do not blow the ratio up).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 1e-12;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (double v : b) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / scale;
}

}  // namespace oracles

#endif  // INTENTFORGE_TESTS_ORACLES_HPP
