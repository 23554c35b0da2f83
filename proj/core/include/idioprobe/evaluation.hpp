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

// Sentence-stratified k-fold cross-validation of person and population probes.
//
// Protocol, shared by every analysis:
//   * all words of a sentence share one fold;
//   * alpha is chosen once per cell, training on folds 1..k-1 and validating
//     on fold 0, then frozen for every fold;
//   * every fold (including fold 0) is scored as a test fold;
//   * the population probe is refitted per fold on the pooled training rows
//     of all participants and scored on each participant's own test rows.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "idioprobe/dataio.hpp"
#include "idioprobe/executor.hpp"
#include "idioprobe/probes.hpp"

namespace idioprobe {

class FoldPlan {
 public:
  FoldPlan() = default;
  FoldPlan(std::size_t k, std::uint64_t seed, std::map<SentenceKey, std::size_t> assignment);

  std::size_t k() const noexcept { return k_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::map<SentenceKey, std::size_t>& assignment() const noexcept { return assignment_; }

  /// Throws SentenceNotInPlan.
  std::size_t fold_of(const SentenceKey& sentence) const;
  std::vector<SentenceKey> sentences_in(std::size_t fold) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;

 private:
  std::size_t k_ = 0;
  std::uint64_t seed_ = 0;
  std::map<SentenceKey, std::size_t> assignment_;
};

/// Deduplicates and sorts the sentences, shuffles them with the seed and
/// deals them round-robin into k folds. Throws TooFewSentences.
FoldPlan make_folds(std::vector<SentenceKey> sentences, std::size_t k, std::uint64_t seed);

/// Distinct sentences of a set of word keys.
std::vector<SentenceKey> sentences_of(std::span<const WordKey> keys);

/// Row indices of a dataset per fold. Throws SentenceNotInPlan, or FoldEmpty
/// when a fold holds none of the dataset's words.
std::vector<std::vector<std::size_t>> fold_rows(const AlignedDataset& ds, const FoldPlan& plan);

/// Complement of fold `f` across the other folds, ascending.
std::vector<std::size_t> train_rows(const std::vector<std::vector<std::size_t>>& folds,
                                    std::size_t f);

struct ProbeResult {
  ProbeScope scope;
  std::string feature_name;
  int layer = -1;
  std::size_t pca_dim = 0;
  std::vector<double> per_fold_rho;
  double mean_rho = 0.0;
  double alpha_used = 0.0;
  std::vector<std::size_t> n_words_per_fold;
  /// Folds whose rho was undefined (constant predictions or targets) and
  /// were scored as 0.
  std::size_t undefined_folds = 0;
  std::size_t alpha_fold = 0;
};

/// Scores a rho for a fold; undefined correlations count as 0 and bump
/// `undefined`.
double fold_rho(std::span<const double> predicted, std::span<const double> actual,
                std::size_t& undefined);

/// A person probe cell: result plus the probe trained for each fold.
struct CvRun {
  ProbeResult result;
  std::vector<RidgeProbe> fold_probes;
};

/// A population probe cell. `result` averages the per-participant scores;
/// `per_participant[i]` scores the pooled probe on participant i's test rows.
struct PopulationRun {
  ProbeResult result;
  std::vector<ProbeResult> per_participant;
  std::vector<RidgeProbe> fold_probes;
};

CvRun cross_validate(const AlignedDataset& dataset, const FoldPlan& plan, const AlphaGrid& grid);

ProbeResult run_cv(const AlignedDataset& dataset, const FoldPlan& plan, const AlphaGrid& grid);

PopulationRun cross_validate_population(std::span<const AlignedDataset> datasets,
                                        const FoldPlan& plan, const AlphaGrid& grid);

struct Comparison {
  double delta_mean = 0.0;
  double t = 0.0;
  double p = 1.0;
  double log10_p = 0.0;
  double df = 0.0;
};

/// Paired person-minus-population test across participants, matched by
/// participant id. Throws InvalidArgument on mismatched participants or
/// cells, ZeroVariance when every difference is identical.
Comparison paired_compare(std::span<const ProbeResult> person,
                          std::span<const ProbeResult> population_per_participant);

/// Person CV for every participant plus the population CV, with the paired
/// comparison when it is defined.
struct PipelineRun {
  std::vector<CvRun> person;
  PopulationRun population;
};

/// Runs person cells on the executor when one is given.
PipelineRun run_pipeline(std::span<const AlignedDataset> datasets, const FoldPlan& plan,
                         const AlphaGrid& grid, const Executor* executor = nullptr);

std::vector<ProbeResult> person_results(const PipelineRun& run);

/// Mean of the per-fold weight vectors of a cell.
Vector mean_fold_weights(std::span<const RidgeProbe> fold_probes);

}  // namespace idioprobe
