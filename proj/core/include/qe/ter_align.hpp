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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qe/types.hpp"

namespace qe {

using TokenSeq = std::vector<std::string>;

/// Splits on runs of whitespace. Empty or blank lines give an empty sequence.
TokenSeq Tokenize(std::string_view line, bool lowercase);

struct EditDistanceResult {
  int cost = 0;
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;
  friend bool operator==(const EditDistanceResult&, const EditDistanceResult&) = default;
};

/// Unit-cost Levenshtein alignment turning `hyp` into `ref`. An insertion is
/// a reference token missing from the hypothesis. Among optimal alignments the
/// one with the most substitutions wins; the traceback then prefers
/// match/substitution, then deletion, then insertion.
EditDistanceResult EditDistance(std::span<const std::string> hyp,
                                std::span<const std::string> ref);

struct TerConfig {
  bool enable_shifts = true;
  /// Longest hypothesis span a single shift may move.
  int max_shift_span = 10;
  /// Largest allowed |destination - origin| in tokens.
  int max_shift_distance = 50;
};

struct TerResult {
  EditCounts edits;
  int ref_word_count = 0;
  double hter = 0.0;
};

/// HTER from edit counts and reference length: sum of the four counts over
/// the reference word count.
double AssembleHter(const EditCounts& edits, int ref_word_count);
/// Same assembly for real-valued (predicted) counts in ins/del/sub/shift order.
double AssembleHter(const PredictedEdits& edits, int ref_word_count);

/// Translation edit rate with greedy block shifts.
///
/// Each round tries every admissible shift (hypothesis span that occurs
/// verbatim in the reference, moved to any position within the distance
/// limit) and keeps the one that lowers the edit distance the most, breaking
/// ties by shorter span, then leftmost origin, then leftmost destination. A
/// shift is accepted only if it lowers the total (edit distance + shifts).
/// Throws Error(kEmptyReference) when `ref` is empty.
TerResult Ter(std::span<const std::string> hyp, std::span<const std::string> ref,
              const TerConfig& config = {});

/// Element-wise Ter over a corpus. Output order matches input order for any
/// `jobs`.
std::vector<TerResult> ScoreCorpus(std::span<const TokenSeq> hyps,
                                   std::span<const TokenSeq> refs,
                                   const TerConfig& config = {}, int jobs = 1);

}  // namespace qe
