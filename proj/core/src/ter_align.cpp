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
#include "qe/ter_align.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <unordered_map>

#include "qe/errors.hpp"
#include "qe/parallel.hpp"

namespace qe {
namespace {

using Ids = std::vector<int>;

// Maps both sequences into a shared integer vocabulary.
void Encode(std::span<const std::string> hyp, std::span<const std::string> ref,
            Ids& hyp_ids, Ids& ref_ids) {
  std::unordered_map<std::string_view, int> vocab;
  auto id_of = [&vocab](const std::string& tok) {
    auto [it, inserted] = vocab.emplace(tok, static_cast<int>(vocab.size()));
    return it->second;
  };
  hyp_ids.clear();
  ref_ids.clear();
  for (const auto& t : hyp) hyp_ids.push_back(id_of(t));
  for (const auto& t : ref) ref_ids.push_back(id_of(t));
}

// Cost-only edit distance with two rolling rows.
int LevenshteinCost(const Ids& hyp, const Ids& ref, std::vector<int>& prev,
                    std::vector<int>& cur) {
  const std::size_t m = ref.size();
  prev.resize(m + 1);
  cur.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Prefix and suffix distance tables of one hypothesis against the
// reference: fwd(i, j) = ED(hyp[:i], ref[:j]), bwd(i, j) = ED(hyp[i:], ref[j:]).
struct DistanceTables {
  std::size_t width = 0;
  std::vector<int> fwd, bwd;

  int* fwd_row(std::size_t i) { return fwd.data() + i * width; }
  const int* bwd_row(std::size_t i) const { return bwd.data() + i * width; }

  void Build(const Ids& hyp, const Ids& ref) {
    const std::size_t n = hyp.size(), m = ref.size();
    width = m + 1;
    fwd.assign((n + 1) * width, 0);
    bwd.assign((n + 1) * width, 0);
    for (std::size_t j = 0; j <= m; ++j) {
      fwd[j] = static_cast<int>(j);
      bwd[n * width + j] = static_cast<int>(m - j);
    }
    for (std::size_t i = 1; i <= n; ++i) {
      int* cur = fwd_row(i);
      const int* prev = fwd_row(i - 1);
      cur[0] = static_cast<int>(i);
      for (std::size_t j = 1; j <= m; ++j) {
        cur[j] = std::min({prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      int* cur = bwd.data() + i * width;
      const int* next = cur + width;
      cur[m] = static_cast<int>(n - i);
      for (std::size_t j = m; j-- > 0;) {
        cur[j] = std::min({next[j + 1] + (hyp[i] == ref[j] ? 0 : 1), next[j] + 1, cur[j + 1] + 1});
      }
    }
  }
};

// Edit distance of \`candidate\`, which equals the tabulated hypothesis outside
// [lo, hi). Recomputes only those rows and joins them to the suffix table.
// Returns \`bound\` as soon as the result is known to be at least \`bound\`.
int CandidateCost(const Ids& candidate, const Ids& ref, DistanceTables& tables, std::size_t lo,
                  std::size_t hi, int bound, std::vector<int>& prev, std::vector<int>& cur) {
  const std::size_t m = ref.size();
  const int* start = tables.fwd_row(lo);
  prev.assign(start, start + m + 1);
  cur.resize(m + 1);
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    cur[0] = static_cast<int>(i);
    int row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = prev[j - 1] + (candidate[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min >= bound) return bound;
    std::swap(prev, cur);
  }
  const int* tail = tables.bwd_row(hi);
  int best = bound;
  for (std::size_t j = 0; j <= m; ++j) best = std::min(best, prev[j] + tail[j]);
  return best;
}

// Minimises cost, then maximises substitutions among minimal-cost
// alignments. Traceback prefers diagonal, then deletion, then insertion.
EditDistanceResult AlignWithTrace(const Ids& hyp, const Ids& ref) {
  struct Cell {
    int cost = 0;
    int subs = 0;
    bool operator<(const Cell& o) const { return cost != o.cost ? cost < o.cost : subs > o.subs; }
    bool operator==(const Cell& o) const { return cost == o.cost && subs == o.subs; }
  };
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  std::vector<Cell> dp((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cell& { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = {static_cast<int>(i), 0};
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = {static_cast<int>(j), 0};
  auto diag_of = [&](std::size_t i, std::size_t j) {
    const int sub = hyp[i - 1] == ref[j - 1] ? 0 : 1;
    const Cell& d = at(i - 1, j - 1);
    return Cell{d.cost + sub, d.subs + sub};
  };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best = diag_of(i, j);
      const Cell del{at(i - 1, j).cost + 1, at(i - 1, j).subs};
      const Cell ins{at(i, j - 1).cost + 1, at(i, j - 1).subs};
      if (del < best) best = del;
      if (ins < best) best = ins;
      at(i, j) = best;
    }
  }

  EditDistanceResult r;
  r.cost = at(n, m).cost;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == diag_of(i, j)) {
      r.substitutions += hyp[i - 1] == ref[j - 1] ? 0 : 1;
      --i;
      --j;
      continue;
    }
    if (i > 0 && at(i, j) == Cell{at(i - 1, j).cost + 1, at(i - 1, j).subs}) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  return r;
}

bool OccursIn(const Ids& ref, const Ids& hyp, std::size_t start, std::size_t len) {
  if (len > ref.size()) return false;
  for (std::size_t r = 0; r + len <= ref.size(); ++r) {
    if (std::equal(hyp.begin() + start, hyp.begin() + start + len, ref.begin() + r)) {
      return true;
    }
  }
  return false;
}

// Moves hyp[start, start+len) so that it begins at index `dest` of the result.
void ApplyShift(const Ids& hyp, std::size_t start, std::size_t len, std::size_t dest,
                Ids& out) {
  out.clear();
  Ids rest;
  rest.reserve(hyp.size() - len);
  rest.insert(rest.end(), hyp.begin(), hyp.begin() + start);
  rest.insert(rest.end(), hyp.begin() + start + len, hyp.end());
  out.insert(out.end(), rest.begin(), rest.begin() + dest);
  out.insert(out.end(), hyp.begin() + start, hyp.begin() + start + len);
  out.insert(out.end(), rest.begin() + dest, rest.end());
}

}  // namespace

TokenSeq Tokenize(std::string_view line, bool lowercase) {
  TokenSeq tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t begin = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > begin) {
      std::string tok(line.substr(begin, i - begin));
      if (lowercase) {
        for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

EditDistanceResult EditDistance(std::span<const std::string> hyp,
                                std::span<const std::string> ref) {
  Ids h, r;
  Encode(hyp, ref, h, r);
  return AlignWithTrace(h, r);
}

double AssembleHter(const PredictedEdits& edits, int ref_word_count) {
  if (ref_word_count <= 0) {
    throw Error(ErrorCode::kEmptyReference, "reference word count must be positive");
  }
  const double total = edits[0] + edits[1] + edits[2] + edits[3];
  return total / double(ref_word_count);
}

double AssembleHter(const EditCounts& edits, int ref_word_count) {
  return AssembleHter(edits.as_array(), ref_word_count);
}

TerResult Ter(std::span<const std::string> hyp, std::span<const std::string> ref,
              const TerConfig& config) {
  if (ref.empty()) throw Error(ErrorCode::kEmptyReference, "reference is empty");

  Ids current, ref_ids;
  Encode(hyp, ref, current, ref_ids);

  std::vector<int> row_a, row_b;
  int cost = LevenshteinCost(current, ref_ids, row_a, row_b);
  int shifts = 0;

  if (config.enable_shifts) {
    Ids candidate, best;
    DistanceTables tables;
    while (cost > 0) {
      const std::size_t n = current.size();
      tables.Build(current, ref_ids);
      int best_cost = cost;
      bool found = false;
      // Enumeration order (span length, origin, destination) realises the
      // tie-break: only a strictly lower cost replaces the incumbent.
      for (std::size_t len = 1; len <= std::min<std::size_t>(n, config.max_shift_span); ++len) {
        for (std::size_t start = 0; start + len <= n; ++start) {
          if (!OccursIn(ref_ids, current, start, len)) continue;
          for (std::size_t dest = 0; dest + len <= n; ++dest) {
            if (dest == start) continue;
            const long distance = std::labs(long(dest) - long(start));
            if (distance > config.max_shift_distance) continue;
            ApplyShift(current, start, len, dest, candidate);
            std::size_t lo = 0, hi = n;
            while (lo < n && candidate[lo] == current[lo]) ++lo;
            if (lo == n) continue;
            while (candidate[hi - 1] == current[hi - 1]) --hi;
            // A shift is only taken if it saves at least two edits.
            const int bound = std::min(best_cost, cost - 1);
            const int c = CandidateCost(candidate, ref_ids, tables, lo, hi, bound, row_a, row_b);
            if (c < bound) {
              best_cost = c;
              best = candidate;
              found = true;
            }
          }
        }
      }
      if (!found) break;
      current.swap(best);
      cost = best_cost;
      ++shifts;
    }
  }

  const EditDistanceResult ed = AlignWithTrace(current, ref_ids);
  TerResult result;
  result.edits.insertions = ed.insertions;
  result.edits.deletions = ed.deletions;
  result.edits.substitutions = ed.substitutions;
  result.edits.shifts = shifts;
  result.ref_word_count = static_cast<int>(ref.size());
  result.hter = AssembleHter(result.edits, result.ref_word_count);
  return result;
}

std::vector<TerResult> ScoreCorpus(std::span<const TokenSeq> hyps,
                                   std::span<const TokenSeq> refs, const TerConfig& config,
                                   int jobs) {
  if (hyps.size() != refs.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "hypothesis count " + std::to_string(hyps.size()) +
                    " != reference count " + std::to_string(refs.size()));
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].empty()) {
      throw Error(ErrorCode::kEmptyReference,
                  "reference " + std::to_string(i) + " is empty", i);
    }
  }
  std::vector<TerResult> out(hyps.size());
  ParallelFor(hyps.size(), jobs, [&](std::size_t i) { out[i] = Ter(hyps[i], refs[i], config); });
  return out;
}

}  // namespace qe
