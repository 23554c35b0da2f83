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

// Characterization and robustness battery built on the CV pipeline: transfer
// matrices, split-half stability, residual independence, confound
// residualization, specificity controls, cross-corpus transfer and probe
// weight geometry.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idioprobe/dataio.hpp"
#include "idioprobe/evaluation.hpp"
#include "idioprobe/executor.hpp"
#include "idioprobe/numerics.hpp"
#include "idioprobe/probes.hpp"
#include "idioprobe/stats.hpp"

namespace idioprobe {

/// Aligned datasets for every participant that has at least one usable row
/// for the feature, in table order. Throws FeatureUnknown if no table has the
/// feature, EmptyIntersection when nobody has rows.
std::vector<AlignedDataset> align_participants(const EmbeddingMatrix& projected,
                                               std::span<const TargetTable> targets,
                                               const std::string& feature);

/// Fold plan over every sentence that appears in any target table.
FoldPlan plan_for_targets(std::span<const TargetTable> targets, std::size_t k, std::uint64_t seed);

/// Mean person rho over participants.
double mean_person_rho(const PipelineRun& run);

/// Paired comparison if defined (nullopt on zero variance).
std::optional<Comparison> try_compare(const PipelineRun& run);

// ---------------------------------------------------------------------------
// transfer

struct TransferMatrix {
  std::vector<std::string> participant_ids;
  Matrix rho;  // (i, j): probe of i scored on j's held-out rows
  double self_mean = 0.0;
  double other_mean = 0.0;
  /// Paired test of diag(i) against the mean of row i's off-diagonal cells.
  std::optional<Comparison> self_vs_other;
};

/// Cell (i, j) is the fold mean of rho(probe_i,f(x_j test f), y_j test f), with
/// probe_i,f trained on fold-train sentences, so the diagonal reproduces the
/// person CV exactly. Throws MissingProbe when a participant has no probes.
TransferMatrix transfer_matrix(std::span<const CvRun> person,
                               std::span<const AlignedDataset> datasets, const FoldPlan& plan,
                               const Executor* executor = nullptr);

// ---------------------------------------------------------------------------
// split-half stability

/// Rows ordered by (corpus, sentence, word position) stand in for reading
/// order and are cut in half. Each half picks alpha on an in-order 80/20 split
/// of its own sentences, refits on the whole half, and the cosine of the two
/// weight vectors is returned. Throws TooFewRows below 2 * (dim + 1) rows.
double split_half(const AlignedDataset& dataset, const AlphaGrid& grid);

struct SplitHalfSummary {
  std::vector<std::string> participant_ids;
  std::vector<double> cosines;
  double mean_cosine = 0.0;
  std::optional<stats::TTest> versus_zero;
};

SplitHalfSummary split_half_all(std::span<const AlignedDataset> datasets, const AlphaGrid& grid,
                                const Executor* executor = nullptr);

// ---------------------------------------------------------------------------
// residual independence

enum class ResidualMode {
  Evaluate,  // score the already-trained person probe on y - population prediction
  Retrain,   // refit the person probe on training residuals (same alpha), then score
};

/// Per fold: r = y_test - predict(population_f, x_test), scored against the
/// person probe of that fold.
ProbeResult residual_independence(const CvRun& person, const PopulationRun& population,
                                  const AlignedDataset& dataset, const FoldPlan& plan,
                                  ResidualMode mode = ResidualMode::Evaluate);

struct ResidualSummary {
  ResidualMode mode = ResidualMode::Evaluate;
  std::vector<ProbeResult> per_participant;
  double mean_rho = 0.0;           // residualized
  double unresidualized_rho = 0.0; // person mean rho on raw targets
  std::optional<stats::TTest> versus_zero;
};

ResidualSummary residual_summary(const PipelineRun& run, std::span<const AlignedDataset> datasets,
                                 const FoldPlan& plan, ResidualMode mode);

// ---------------------------------------------------------------------------
// confounds

struct ConfoundResidualization {
  TargetTable table;                        // feature replaced by OLS residuals
  double r_squared = 0.0;                   // nuisance R^2
  std::size_t n_rows = 0;
  std::vector<std::string> dropped_confounds;  // collinear columns
};

/// Per participant OLS of the feature on [1, freq_log, length, sent_position,
/// surprisal]; residuals replace the feature. Collinear confound columns are
/// dropped (and listed) rather than failing. Throws FeatureUnknown or
/// TooFewRows.
ConfoundResidualization residualize_confounds(const TargetTable& table, const std::string& feature);

struct ConfoundControl {
  std::string feature;
  double person_raw = 0.0;
  double pop_raw = 0.0;
  double person_residualized = 0.0;
  double pop_residualized = 0.0;
  std::optional<Comparison> residualized_comparison;
  double mean_r_squared = 0.0;
  std::vector<double> r_squared;  // per participant
  std::vector<std::string> warnings;
};

/// Reruns the full pipeline on raw and on confound-residualized targets with
/// the same fold plan.
ConfoundControl confound_control(const EmbeddingMatrix& projected,
                                 std::span<const TargetTable> targets, const std::string& feature,
                                 const FoldPlan& plan, const AlphaGrid& grid,
                                 const Executor* executor = nullptr);

// ---------------------------------------------------------------------------
// specificity controls

enum class ControlKind { Shuffle, RandomProjection, RandomEmbedding, StaticEmbedding, NegativeFeature };

std::string_view to_string(ControlKind kind) noexcept;
/// Accepts SHUFFLE, RANDOM_PROJECTION, RANDOM_EMBEDDING, STATIC_EMBEDDING,
/// NEGATIVE_FEATURE (case-insensitive). Throws InvalidArgument.
ControlKind parse_control_kind(std::string_view name);

struct ControlOutcome {
  ControlKind kind = ControlKind::Shuffle;
  double person_rho = 0.0;
  double pop_rho = 0.0;
  double delta = 0.0;
  std::optional<double> p;                     // absent for SHUFFLE or zero variance
  std::optional<std::size_t> n_permutations;   // SHUFFLE only
  std::vector<double> permutation_deltas;      // SHUFFLE only, one per permutation
  std::string detail;
};

struct ControlInputs {
  const EmbeddingMatrix* embeddings = nullptr;  // raw layer, before PCA
  std::span<const TargetTable> targets;
  std::string feature;
  std::size_t pca_dim = 50;
  const FoldPlan* plan = nullptr;
  const AlphaGrid* grid = nullptr;
  std::uint64_t seed = 42;
  std::size_t n_permutations = 10;
  const EmbeddingMatrix* static_embeddings = nullptr;  // STATIC_EMBEDDING
  std::string negative_feature;                        // NEGATIVE_FEATURE
  const Executor* executor = nullptr;
};

/// Reruns the person/population pipeline under one substitution:
///   SHUFFLE           targets permuted within each participant, averaged over
///                     n_permutations seeded runs;
///   RANDOM_PROJECTION PCA components replaced by a seeded orthonormal basis;
///   RANDOM_EMBEDDING  each word key gets a seeded N(0, I_pca_dim) vector,
///                     identical across participants;
///   STATIC_EMBEDDING  the static embedding file replaces the layer (reduced
///                     with PCA when wider than pca_dim);
///   NEGATIVE_FEATURE  the pipeline on `negative_feature`.
ControlOutcome run_control(ControlKind kind, const ControlInputs& inputs);

// ---------------------------------------------------------------------------
// cross-corpus transfer

struct CrossDatasetResult {
  std::string train_corpus;
  std::string test_corpus;
  std::string feature;
  double within_rho = 0.0;   // population CV inside the test corpus
  double cross_rho = 0.0;    // pooled probe from the train corpus, scored on the test corpus
  std::optional<double> retention;  // cross / within; absent when within is 0
  double alpha_used = 0.0;
};

/// `datasets` hold every participant of both corpora for one feature, in a
/// shared (projected) embedding space. Throws CorpusMissing.
CrossDatasetResult cross_dataset_transfer(std::span<const AlignedDataset> datasets,
                                          const std::string& train_corpus,
                                          const std::string& test_corpus, const FoldPlan& plan,
                                          const AlphaGrid& grid);

// ---------------------------------------------------------------------------
// weight geometry

struct WeightGeometry {
  double mean_pairwise_cosine = 0.0;
  double mean_cosine_to_population = 0.0;
  std::size_t n_pairs = 0;
};

/// Cosines between fold-averaged weight vectors. Throws InvalidArgument for
/// fewer than two person probes, DimMismatch on mixed dims.
WeightGeometry weight_geometry(std::span<const CvRun> person, const PopulationRun& population);

}  // namespace idioprobe
