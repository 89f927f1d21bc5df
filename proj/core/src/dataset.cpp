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
#include "qe/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "qe/errors.hpp"

namespace qe {
namespace {

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) fields.push_back(line.substr(b, i - b));
  }
  return fields;
}

double ParseCell(std::string_view cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  if (!cell.empty() && cell.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonNumericCell,
                "row " + std::to_string(row + 1) + " col " + std::to_string(col + 1) + ": '" +
                    std::string(cell) + "'",
                row);
  }
  return v;
}

// Reads numeric rows; blank lines are allowed only at the end of the input.
std::vector<std::vector<double>> ParseRows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t pending_blank = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    const auto fields = SplitFields(line);
    if (fields.empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0) {
      throw Error(ErrorCode::kRaggedRows,
                  "blank line before row " + std::to_string(rows.size() + pending_blank + 1),
                  rows.size());
    }
    const std::size_t r = rows.size();
    if (r == 0) width = fields.size();
    if (fields.size() != width) {
      throw Error(ErrorCode::kRaggedRows,
                  "row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                      " columns, expected " + std::to_string(width),
                  r);
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) values[c] = ParseCell(fields[c], r, c);
    rows.push_back(std::move(values));
  }
  return rows;
}

}  // namespace

void QeDataset::Validate() const {
  const std::size_t n = size();
  auto check = [n](std::size_t got, const char* what) {
    if (got != n) {
      throw Error(ErrorCode::kLengthMismatch, std::string(what) + " has " + std::to_string(got) +
                                                  " entries, features have " + std::to_string(n));
    }
  };
  if (has_edits()) check(gold_edits.size(), "gold_edits");
  if (has_hter()) check(gold_hter.size(), "gold_hter");
  if (!target_lengths.empty()) check(target_lengths.size(), "target_lengths");
  if (ref_lengths) check(ref_lengths->size(), "ref_lengths");
  if (!features.allFinite()) throw Error(ErrorCode::kNonFiniteInput, "features contain NaN/inf");
  if (has_edits() && has_hter() && ref_lengths) {
    for (std::size_t i = 0; i < n; ++i) {
      const double h = AssembleHter(gold_edits[i], (*ref_lengths)[i]);
      if (std::abs(h - gold_hter[i]) > 1e-6) {
        throw Error(ErrorCode::kFormatError,
                    "gold HTER at row " + std::to_string(i + 1) +
                        " disagrees with edit counts and reference length",
                    i);
      }
    }
  }
}

QeDataset QeDataset::Subset(std::span<const std::size_t> indices) const {
  QeDataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = indices[k];
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(i));
    if (has_edits()) out.gold_edits.push_back(gold_edits[i]);
    if (has_hter()) out.gold_hter.push_back(gold_hter[i]);
    if (!target_lengths.empty()) out.target_lengths.push_back(target_lengths[i]);
  }
  if (ref_lengths) {
    out.ref_lengths.emplace();
    for (auto i : indices) out.ref_lengths->push_back((*ref_lengths)[i]);
  }
  return out;
}

Matrix QeDataset::EditMatrix() const {
  Matrix m(static_cast<Eigen::Index>(gold_edits.size()), kNumEditOps);
  for (std::size_t i = 0; i < gold_edits.size(); ++i) {
    const auto a = gold_edits[i].as_array();
    for (std::size_t k = 0; k < kNumEditOps; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = a[k];
    }
  }
  return m;
}

FeatureMatrix ParseFeatures(std::istream& in) {
  const auto rows = ParseRows(in);
  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()),
                  rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return x;
}

FeatureMatrix LoadFeatures(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return ParseFeatures(in);
}

void WriteFeatures(std::ostream& out, const FeatureMatrix& x) {
  char buf[64];
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", x(r, c));
      if (c > 0) out << '\t';
      out << buf;
    }
    out << '\n';
  }
}

std::vector<double> LoadHterLabels(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  const auto rows = ParseRows(in);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 1) {
      throw Error(ErrorCode::kRaggedRows, "HTER label file must have one column", r);
    }
    out.push_back(rows[r][0]);
  }
  return out;
}

std::vector<EditCounts> LoadEditLabels(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  const auto rows = ParseRows(in);
  std::vector<EditCounts> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != kNumEditOps) {
      throw Error(ErrorCode::kRaggedRows, "edit label file must have 4 columns (ins del sub shift)",
                  r);
    }
    int v[kNumEditOps];
    for (std::size_t k = 0; k < kNumEditOps; ++k) {
      const double d = rows[r][k];
      if (d < 0 || d != std::floor(d)) {
        throw Error(ErrorCode::kNonNumericCell,
                    "edit count at row " + std::to_string(r + 1) +
                        " is not a non-negative integer",
                    r);
      }
      v[k] = static_cast<int>(d);
    }
    out.push_back(EditCounts{v[0], v[1], v[2], v[3]});
  }
  return out;
}

int CountLabelColumns(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto f = SplitFields(line);
    if (!f.empty()) return static_cast<int>(f.size());
  }
  return 0;
}

std::vector<TokenSeq> LoadSentences(const std::filesystem::path& path, bool lowercase) {
  auto in = OpenOrThrow(path);
  std::vector<TokenSeq> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(Tokenize(line, lowercase));
  return out;
}

std::vector<int> SentenceLengths(const std::filesystem::path& path) {
  std::vector<int> out;
  for (const auto& s : LoadSentences(path, false)) out.push_back(static_cast<int>(s.size()));
  return out;
}

Scaler FitScaler(const FeatureMatrix& x) {
  if (x.rows() < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "need at least 2 rows to fit a scaler, got " + std::to_string(x.rows()));
  }
  Scaler s;
  const double n = double(x.rows());
  s.means = x.colwise().sum().transpose() / n;
  s.stds.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.means(c)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.stds(c) = sd < kMinFeatureStd ? 1.0 : sd;
  }
  return s;
}

FeatureMatrix ApplyScaler(const Scaler& scaler, const FeatureMatrix& x) {
  if (x.cols() != scaler.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features have " + std::to_string(x.cols()) + " columns, scaler expects " +
                    std::to_string(scaler.dim()));
  }
  FeatureMatrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out.row(r) = (x.row(r).transpose() - scaler.means).cwiseQuotient(scaler.stds).transpose();
  }
  return out;
}

}  // namespace qe
