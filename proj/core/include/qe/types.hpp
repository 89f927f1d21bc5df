// Copyright 2026 The qe-hter Authors.
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

#include <array>
#include <cstddef>
#include <Eigen/Core>

namespace qe {

/// Row-major dense matrix; one row per sentence.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Feature values, n sentences by D features.
using FeatureMatrix = Matrix;

/// Order of the four edit operations wherever they appear as columns.
enum class EditOp : std::size_t { kInsertion = 0, kDeletion = 1, kSubstitution = 2, kShift = 3 };
inline constexpr std::size_t kNumEditOps = 4;
inline constexpr std::array<const char*, kNumEditOps> kEditOpNames = {"ins", "del", "sub", "shift"};

/// Gold edit counts for one sentence pair, as produced by TER alignment.
struct EditCounts {
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;
  int shifts = 0;

  int total() const { return insertions + deletions + substitutions + shifts; }
  std::array<double, kNumEditOps> as_array() const {
    return {double(insertions), double(deletions), double(substitutions), double(shifts)};
  }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

/// Predicted (real-valued) edit counts.
using PredictedEdits = std::array<double, kNumEditOps>;

}  // namespace qe
