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

// Layer sweep: PCA plus person/population CV for every (layer, pca_dim,
// feature) cell, with paired comparisons, effect sizes and bootstrap
// intervals.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idioprobe/dataio.hpp"
#include "idioprobe/evaluation.hpp"
#include "idioprobe/executor.hpp"
#include "idioprobe/pca.hpp"
#include "idioprobe/probes.hpp"
#include "idioprobe/stats.hpp"

namespace idioprobe {

struct ProjectedLayer {
  PcaModel model;
  EmbeddingMatrix projected;
};

/// PCA fitted on every word-occurrence row of the layer.
ProjectedLayer reduce(const EmbeddingMatrix& raw, std::size_t d);

/// Tables of the listed participants, in table order; an empty list keeps
/// every table. Throws InvalidArgument on an id with no table.
std::vector<TargetTable> filter_participants(std::span<const TargetTable> targets,
                                             std::span<const std::string> participants);

/// Union of feature names, in first-seen order.
std::vector<std::string> all_features(std::span<const TargetTable> targets);

struct SweepConfig {
  std::map<std::uint32_t, std::filesystem::path> layer_files;
  std::vector<std::uint32_t> layers;
  std::vector<std::size_t> pca_dims{50};
  std::vector<std::string> features;      // empty: every feature
  std::vector<std::string> participants;  // empty: every participant
  std::size_t k_folds = 5;
  std::uint64_t fold_seed = 42;
  AlphaGrid grid = AlphaGrid::standard();
  std::uint64_t bootstrap_seed = 20240601;
  std::size_t bootstrap_b = 10000;
  double confidence = 0.95;
};

struct CellKey {
  std::uint32_t layer = 0;
  std::size_t pca_dim = 0;
  std::string feature;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct SweepCell {
  CellKey key;
  std::vector<CvRun> person;
  PopulationRun population;
  std::vector<double> coverage;  // per participant, aligned with `person`
  std::optional<Comparison> comparison;
  std::optional<double> cohens_d;
  std::optional<stats::BootstrapCI> delta_ci;  // mean person-minus-population rho
};

struct PcaSummary {
  std::uint32_t layer = 0;
  std::size_t pca_dim = 0;
  std::size_t input_dim = 0;
  std::size_t n_rows = 0;
  double retained_variance = 0.0;
  Vector explained_variance_ratio;
};

struct SweepReport {
  std::vector<SweepCell> cells;  // layer-major, then pca_dim, then feature
  FoldPlan plan;
  std::vector<double> alpha_grid;
  std::uint64_t bootstrap_seed = 0;
  std::size_t bootstrap_b = 0;
  double confidence = 0.0;
  std::vector<PcaSummary> pca;
  std::vector<std::string> participants;

  /// Person results plus one population result per cell.
  std::size_t probe_result_count() const;
};

/// Reads one EMB1 file per requested layer. Throws MissingLayerFile.
SweepReport layer_sweep(const SweepConfig& config, std::span<const TargetTable> targets,
                        const Executor* executor = nullptr);

/// Same sweep over embeddings already in memory, one per entry of
/// config.layers (layer_files is ignored).
SweepReport layer_sweep(const SweepConfig& config, std::span<const EmbeddingMatrix> layers,
                        std::span<const TargetTable> targets, const Executor* executor = nullptr);

/// One cell, shared by the sweep and the single-cell commands.
SweepCell run_cell(const CellKey& key, std::span<const AlignedDataset> datasets,
                   const FoldPlan& plan, const SweepConfig& config,
                   const Executor* executor = nullptr);

}  // namespace idioprobe
