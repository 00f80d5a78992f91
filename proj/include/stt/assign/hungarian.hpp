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

#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace stt::assign {

/// Marks a pair that may not be matched.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

/// Dense rows x cols cost matrix; entries are finite or kForbidden.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = kForbidden);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  /// Throws std::invalid_argument for NaN or -inf.
  void set(std::size_t r, std::size_t c, double value);
  bool allowed(std::size_t r, std::size_t c) const { return (*this)(r, c) != kForbidden; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Matching = std::vector<std::pair<int, int>>;

/// Optimal assignment with maximum-cardinality-then-minimum-cost semantics:
/// among all matchings that use only allowed entries and have the largest
/// possible size, returns one of least total cost. Among equal-cost optima,
/// the lexicographically smallest (row, col) pair list is returned.
/// Output is sorted by row.
Matching solve(const CostMatrix& costs);

/// Sum of the matched entries.
double total_cost(const CostMatrix& costs, const Matching& matching);

}  // namespace stt::assign
