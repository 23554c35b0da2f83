/*
 * Copyright 2026 The idioprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idioprobe/sweep.hpp"

namespace idioprobe::app {

/// Everything a command needs. Serialized as JSON; see README for the grammar.
struct RunConfig {
  /// EMB1 path per layer; "{layer}" is replaced by the layer number.
  std::string embeddings;
  std::string targets;
  std::string out = "idioprobe_out";
  std::string static_embeddings;  // optional, STATIC_EMBEDDING control

  std::vector<std::uint32_t> layers{24};
  std::vector<std::size_t> pca_dims{50};
  std::vector<std::string> features;      // empty: ALL
  std::vector<std::string> participants;  // empty: ALL
  std::size_t k_folds = 5;
  std::vector<double> alpha_grid{0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};

  std::uint64_t seed_folds = 42;
  std::uint64_t seed_bootstrap = 20240601;
  std::uint64_t seed_controls = 7;
  std::size_t bootstrap_b = 10000;
  double confidence = 0.95;

  bool residual_retrain = false;  // also report the retrain-on-residuals variant
  std::vector<std::string> controls;  // empty: every control the inputs allow
  std::size_t n_permutations = 10;
  std::string negative_feature;
  std::string train_corpus;
  std::string test_corpus;

  std::size_t threads = 0;  // 0: AUTO

  std::filesystem::path embedding_path(std::uint32_t layer) const;
  SweepConfig sweep_config() const;
};

/// Parses a config document. A top-level "config" object (as written to
/// meta.json) is unwrapped first. Unknown keys are rejected. Throws
/// ConfigInvalid.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Full config echo. `with_runtime` adds the output dir and thread count,
/// which never influence results and are kept out of report.json.
nlohmann::json config_to_json(const RunConfig& config, bool with_runtime);

/// Checks value ranges and that every referenced input path exists.
/// Throws ConfigInvalid.
void validate(const RunConfig& config);

/// Worker count: IDIOPROBE_THREADS, else the configured count, else hardware.
std::size_t effective_threads(const RunConfig& config);

}  // namespace idioprobe::app
