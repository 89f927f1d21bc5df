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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qe/ter_align.hpp"
#include "qe/types.hpp"

namespace qe {

/// Per-feature standardisation parameters.
struct Scaler {
  Vector means;
  Vector stds;  // always > 0

  Eigen::Index dim() const { return means.size(); }
};

/// Columns whose population std falls below this get std = 1.
inline constexpr double kMinFeatureStd = 1e-12;

/// Features and labels for one data split. Optional label lists are empty
/// when absent; when present they have one entry per feature row.
struct QeDataset {
  FeatureMatrix features;
  std::vector<EditCounts> gold_edits;
  std::vector<double> gold_hter;
  std::vector<int> target_lengths;
  std::optional<std::vector<int>> ref_lengths;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  bool has_edits() const { return !gold_edits.empty(); }
  bool has_hter() const { return !gold_hter.empty(); }

  /// Checks list lengths and, when edits and reference lengths are both
  /// present, that gold_hter matches them. Throws Error on violation.
  void Validate() const;

  /// Rows selected by `indices`, in that order.
  QeDataset Subset(std::span<const std::size_t> indices) const;

  /// n x 4 matrix of gold edit counts in ins/del/sub/shift order.
  Matrix EditMatrix() const;
};

FeatureMatrix ParseFeatures(std::istream& in);
FeatureMatrix LoadFeatures(const std::filesystem::path& path);
/// Writes with 17 significant digits, tab separated.
void WriteFeatures(std::ostream& out, const FeatureMatrix& x);

std::vector<double> LoadHterLabels(const std::filesystem::path& path);
/// Four integral columns: ins del sub shift.
std::vector<EditCounts> LoadEditLabels(const std::filesystem::path& path);
/// Number of whitespace-separated columns on the first non-blank line.
int CountLabelColumns(const std::filesystem::path& path);

std::vector<TokenSeq> LoadSentences(const std::filesystem::path& path, bool lowercase);
std::vector<int> SentenceLengths(const std::filesystem::path& path);

/// Per-column mean and population standard deviation. Needs at least 2 rows.
Scaler FitScaler(const FeatureMatrix& x);
FeatureMatrix ApplyScaler(const Scaler& scaler, const FeatureMatrix& x);

}  // namespace qe
