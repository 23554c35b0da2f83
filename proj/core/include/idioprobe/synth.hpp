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

// Synthetic multi-participant data with planted linear directions.
//
// For participant i reading word w (embedding x(w) ~ N(0, I_dim)):
//
//   signal_i(w)     = a * x(w).gamma_c + b * x(w).beta_i + sigma * eps_i,w
//   structural_i(w) = (a + b) * x(w).gamma_c + sigma * eps'_i,w
//
// gamma_c is the population direction of participant i's corpus, beta_i the
// participant's own unit direction. "structural" has no person component and
// plays the role of a text-driven negative-control feature.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idioprobe/dataio.hpp"

namespace idioprobe {

enum class PersonDirs { RandomUnit, Orthogonal, Shared };
enum class CorpusDirs { Shared, Orthogonal };

struct SynthConfig {
  std::size_t n_participants = 30;
  std::size_t n_sentences = 250;       // per corpus
  std::size_t words_per_sentence = 20;
  std::size_t dim = 50;
  double pop_strength = 0.1;           // a
  double person_strength = 0.3;        // b
  double noise_sd = 1.0;               // sigma
  PersonDirs person_dirs = PersonDirs::RandomUnit;
  double missing_rate = 0.0;
  std::uint64_t seed = 20240601;
  std::size_t n_corpora = 1;           // participants are dealt round-robin
  CorpusDirs corpus_dirs = CorpusDirs::Shared;
  /// Adds confound_weight * z(freq_log) to both features, for stressing
  /// confound residualization. 0 keeps confounds independent of targets.
  double confound_weight = 0.0;
  std::uint32_t layer = 24;
  std::string model_id = "synthetic";

  /// 30 participants, dim 50, 5,000 words, a=0.1, b=0.3, sigma=1.
  static SynthConfig reference();

  /// Throws ConfigInvalid.
  void validate() const;
};

inline constexpr const char* kSynthSignalFeature = "signal";
inline constexpr const char* kSynthStructuralFeature = "structural";

std::string synth_corpus_id(std::size_t corpus, std::size_t n_corpora);
std::string synth_participant_id(std::size_t i);

struct SynthData {
  EmbeddingMatrix embeddings;
  std::vector<TargetTable> targets;            // ordered by participant id
  std::vector<Vector> population_directions;   // one per corpus
  std::vector<Vector> person_directions;       // one per participant
  std::vector<std::size_t> corpus_of_participant;
};

/// Deterministic in the config: the same config gives bit-identical data.
SynthData generate(const SynthConfig& config);

struct OracleRho {
  double person = 0.0;
  double population = 0.0;
  std::size_t trials = 0;
};

/// Brute-force reference for the expected held-out Spearman rho of the
/// "signal" feature. Each trial regenerates data with a derived seed, fits
/// ordinary least squares on the first 80% of sentences and scores the last
/// 20%, per participant and for the pooled fit. Uses its own elimination
/// solver and ranking, independent of the probe and stats code paths.
/// Throws ConfigInvalid (including trials < 10).
OracleRho oracle_expected_rho(const SynthConfig& config, std::size_t trials);

}  // namespace idioprobe
