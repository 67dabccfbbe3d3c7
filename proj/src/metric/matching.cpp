#include <algorithm>
#include <cmath>
#include <limits>

#include "sketchkit/errors.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::metric {

// Hungarian method with potentials on the square padding of the matrix,
// minimizing the negated weights.
Matching max_weight_matching(const std::vector<std::vector<double>>& weights) {
  std::size_t rows = weights.size();
  std::size_t cols = rows ? weights[0].size() : 0;
  for (const auto& row : weights) {
    if (row.size() != cols) throw DomainError("weight matrix rows differ in length");
    for (double w : row) {
      if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and >= 0");
    }
  }
  Matching result;
  result.assignment.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    return i < rows && j < cols ? -weights[i][j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols) {
      result.assignment[i - 1] = static_cast<int>(j - 1);
      result.total += weights[i - 1][j - 1];
    }
  }
  return result;
}

}  // namespace sketchkit::metric
