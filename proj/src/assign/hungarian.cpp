// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stt/assign/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace stt::assign {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (std::isnan(fill) || fill == -kForbidden) {
    throw std::invalid_argument("CostMatrix: fill must be finite or kForbidden");
  }
}

void CostMatrix::set(std::size_t r, std::size_t c, double value) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("CostMatrix::set index out of range");
  if (std::isnan(value) || value == -kForbidden) {
    throw std::invalid_argument("CostMatrix: entries must be finite or kForbidden");
  }
  data_[r * cols_ + c] = value;
}

namespace {

// Square min-cost perfect matching with potentials (shortest augmenting paths).
// a is n x n, 1-indexed internally. On return, row_of[j] is the row matched to
// column j and u, v satisfy a[i][j] - u[i] - v[j] >= 0 with equality on the matching.
struct SquareSolution {
  std::vector<int> col_of_row;
  std::vector<int> row_of_col;
  std::vector<double> u;
  std::vector<double> v;
};

SquareSolution solve_square(const std::vector<double>& a, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  SquareSolution out;
  out.col_of_row.assign(n, -1);
  out.row_of_col.assign(n, -1);
  out.u.assign(n, 0.0);
  out.v.assign(n, 0.0);
  for (int j = 1; j <= n; ++j) {
    out.row_of_col[j - 1] = p[j] - 1;
    out.col_of_row[p[j] - 1] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    out.u[i] = u[i + 1];
    out.v[i] = v[i + 1];
  }
  return out;
}

}  // namespace

Matching solve(const CostMatrix& costs) {
  if (costs.empty()) return {};
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());
  const int n = std::max(rows, cols);

  double max_abs = 0.0;
  bool any_allowed = false;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (costs.allowed(r, c)) {
        max_abs = std::max(max_abs, std::abs(costs(r, c)));
        any_allowed = true;
      }
    }
  }
  if (!any_allowed) return {};

  // Allowed entries are shifted by -bonus so that one extra matched pair always
  // outweighs any cost difference; padding and forbidden entries cost 0 and
  // stand for "unmatched".
  const double bonus = 2.0 * (n + 1) * max_abs + 1.0;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (costs.allowed(r, c)) a[r * n + c] = costs(r, c) - bonus;
    }
  }
  SquareSolution sol = solve_square(a, n);

  // Every optimal matching is a perfect matching of the tight-edge subgraph.
  // Walk rows in order and pin each to its smallest feasible real column,
  // re-routing the rest of the matching along alternating paths.
  const double tol = 1e-12 * (1.0 + bonus) * n;
  const auto tight = [&](int r, int c) {
    return std::abs(a[r * n + c] - sol.u[r] - sol.v[c]) <= tol;
  };
  const auto real = [&](int r, int c) { return r < rows && c < cols && costs.allowed(r, c); };

  std::vector<char> fixed(n, 0);
  std::vector<char> visited(n);
  // Finds an alternating path from free row `start` to the free column `target`
  // through unfixed rows, and flips it.
  std::function<bool(int, int)> augment = [&](int row, int target) -> bool {
    for (int c = 0; c < n; ++c) {
      if (visited[c] || !tight(row, c)) continue;
      visited[c] = 1;
      if (c == target) {
        sol.col_of_row[row] = c;
        sol.row_of_col[c] = row;
        return true;
      }
      const int owner = sol.row_of_col[c];
      if (owner < 0 || fixed[owner]) continue;
      if (augment(owner, target)) {
        sol.col_of_row[row] = c;
        sol.row_of_col[c] = row;
        return true;
      }
    }
    return false;
  };
  const auto try_pin = [&](int r, int c) -> bool {
    if (sol.col_of_row[r] == c) return true;
    const int displaced = sol.row_of_col[c];
    if (fixed[displaced]) return false;
    const int freed = sol.col_of_row[r];
    auto saved_rows = sol.row_of_col;
    auto saved_cols = sol.col_of_row;
    sol.col_of_row[r] = c;
    sol.row_of_col[c] = r;
    sol.row_of_col[freed] = -1;
    sol.col_of_row[displaced] = -1;
    fixed[r] = 1;
    std::fill(visited.begin(), visited.end(), 0);
    visited[c] = 1;
    if (augment(displaced, freed)) return true;
    fixed[r] = 0;
    sol.row_of_col = std::move(saved_rows);
    sol.col_of_row = std::move(saved_cols);
    return false;
  };

  for (int r = 0; r < rows; ++r) {
    bool pinned = false;
    for (int c = 0; c < cols && !pinned; ++c) {
      if (real(r, c) && tight(r, c)) pinned = try_pin(r, c);
    }
    // All non-real columns mean "unmatched" and are interchangeable.
    if (!pinned && !real(r, sol.col_of_row[r])) pinned = true;
    for (int c = 0; c < n && !pinned; ++c) {
      if (!real(r, c) && tight(r, c)) pinned = try_pin(r, c);
    }
    fixed[r] = 1;
  }

  Matching out;
  for (int r = 0; r < rows; ++r) {
    const int c = sol.col_of_row[r];
    if (real(r, c)) out.emplace_back(r, c);
  }
  return out;
}

double total_cost(const CostMatrix& costs, const Matching& matching) {
  double sum = 0.0;
  for (const auto& [r, c] : matching) sum += costs(r, c);
  return sum;
}

}  // namespace stt::assign
