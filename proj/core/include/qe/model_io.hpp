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
#include <string>
#include <string_view>

#include "qe/pipeline.hpp"

namespace qe {

inline constexpr int kModelSchemaVersion = 1;

/// Versioned JSON document: variant kind, normalisation policy, denominator
/// mode, scaler, and every underlying model (tagged "mlp" or "svr") with its
/// configuration and row-major parameters. Doubles are written in shortest
/// round-trip form, so save/load is bit-exact.
std::string PredictorToJson(const Predictor& p);
Predictor PredictorFromJson(std::string_view text);

void SavePredictor(const Predictor& p, const std::filesystem::path& path);
Predictor LoadPredictor(const std::filesystem::path& path);

}  // namespace qe
