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

#include "idioprobe/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "idioprobe/error.hpp"
#include "idioprobe/rng.hpp"
#include "idioprobe/stats.hpp"

namespace idioprobe {

namespace {

std::string describe(const SentenceKey& s) {
  return "(" + s.corpus_id + ", " + std::to_string(s.sentence_id) + ")";
}

Vector gather(std::span<const double> v, std::span<const std::size_t> rows) {
  Vector out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

GramStats merge_except(const std::vector<GramStats>& parts, std::size_t skip) {
  GramStats out;
  for (std::size_t f = 0; f < parts.size(); ++f) {
    if (f != skip) out.merge(parts[f]);
  }
  return out;
}

void finish_mean(ProbeResult& r) {
  r.mean_rho = stats::mean(r.per_fold_rho);
}

}  // namespace

// ---------------------------------------------------------------------------
// folds

FoldPlan::FoldPlan(std::size_t k, std::uint64_t seed, std::map<SentenceKey, std::size_t> assignment)
    : k_(k), seed_(seed), assignment_(std::move(assignment)) {
  for (const auto& [sentence, fold] : assignment_) {
    if (fold >= k_) {
      throw Error(Errc::InvalidArgument, "fold plan assigns " + describe(sentence) +
                                             " to fold " + std::to_string(fold) + " >= k");
    }
  }
}

std::size_t FoldPlan::fold_of(const SentenceKey& sentence) const {
  const auto it = assignment_.find(sentence);
  if (it == assignment_.end()) {
    throw Error(Errc::SentenceNotInPlan, "sentence " + describe(sentence) + " is not in the fold plan");
  }
  return it->second;
}

std::vector<SentenceKey> FoldPlan::sentences_in(std::size_t fold) const {
  std::vector<SentenceKey> out;
  for (const auto& [sentence, f] : assignment_) {
    if (f == fold) out.push_back(sentence);
  }
  return out;
}

FoldPlan make_folds(std::vector<SentenceKey> sentences, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidArgument, "make_folds: k must be >= 2");
  std::sort(sentences.begin(), sentences.end());
  sentences.erase(std::unique(sentences.begin(), sentences.end()), sentences.end());
  if (sentences.size() < k) {
    throw Error(Errc::TooFewSentences, "make_folds: " + std::to_string(sentences.size()) +
                                           " sentences for k=" + std::to_string(k));
  }
  Rng rng(seed);
  rng.shuffle(std::span<SentenceKey>(sentences));
  std::map<SentenceKey, std::size_t> assignment;
  for (std::size_t i = 0; i < sentences.size(); ++i) assignment.emplace(sentences[i], i % k);
  return FoldPlan(k, seed, std::move(assignment));
}

std::vector<SentenceKey> sentences_of(std::span<const WordKey> keys) {
  std::set<SentenceKey> seen;
  for (const auto& k : keys) seen.insert(sentence_of(k));
  return {seen.begin(), seen.end()};
}

std::vector<std::vector<std::size_t>> fold_rows(const AlignedDataset& ds, const FoldPlan& plan) {
  std::vector<std::vector<std::size_t>> folds(plan.k());
  for (std::size_t r = 0; r < ds.keys.size(); ++r) {
    folds[plan.fold_of(sentence_of(ds.keys[r]))].push_back(r);
  }
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].empty()) {
      throw Error(Errc::FoldEmpty, "participant '" + ds.participant_id + "', feature '" +
                                       ds.feature_name + "': fold " + std::to_string(f) +
                                       " has no test words");
    }
  }
  return folds;
}

std::vector<std::size_t> train_rows(const std::vector<std::vector<std::size_t>>& folds,
                                    std::size_t f) {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double fold_rho(std::span<const double> predicted, std::span<const double> actual,
                std::size_t& undefined) {
  if (predicted.size() < 3) {
    ++undefined;
    return 0.0;
  }
  const auto rho = stats::try_spearman(predicted, actual);
  if (!rho) {
    ++undefined;
    return 0.0;
  }
  return *rho;
}

// ---------------------------------------------------------------------------
// person CV

CvRun cross_validate(const AlignedDataset& ds, const FoldPlan& plan, const AlphaGrid& grid) {
  const auto folds = fold_rows(ds, plan);
  const std::size_t k = folds.size();

  std::vector<GramStats> parts;
  parts.reserve(k);
  for (const auto& rows : folds) parts.push_back(GramStats::from_rows(ds.x, ds.y, rows));

  const Matrix x_val = ds.x.select_rows(folds[0]);
  const Vector y_val = gather(ds.y, folds[0]);
  const AlphaChoice choice = select_alpha(merge_except(parts, 0), x_val, y_val, grid);

  CvRun run;
  auto& r = run.result;
  r.scope = ProbeScope::person(ds.participant_id);
  r.feature_name = ds.feature_name;
  r.alpha_used = choice.alpha;
  r.pca_dim = ds.x.cols();
  for (std::size_t f = 0; f < k; ++f) {
    RidgeProbe probe = fit_ridge(merge_except(parts, f), choice.alpha);
    probe.scope = r.scope;
    probe.feature_name = ds.feature_name;
    const Vector pred = predict(probe, ds.x.select_rows(folds[f]));
    r.per_fold_rho.push_back(fold_rho(pred, gather(ds.y, folds[f]), r.undefined_folds));
    r.n_words_per_fold.push_back(folds[f].size());
    run.fold_probes.push_back(std::move(probe));
  }
  finish_mean(r);
  return run;
}

ProbeResult run_cv(const AlignedDataset& dataset, const FoldPlan& plan, const AlphaGrid& grid) {
  return cross_validate(dataset, plan, grid).result;
}

// ---------------------------------------------------------------------------
// population CV

PopulationRun cross_validate_population(std::span<const AlignedDataset> datasets,
                                        const FoldPlan& plan, const AlphaGrid& grid) {
  if (datasets.empty()) throw Error(Errc::InvalidArgument, "population CV: no datasets");
  const std::string& feature = datasets.front().feature_name;
  const std::size_t dim = datasets.front().x.cols();
  for (const auto& ds : datasets) {
    if (ds.feature_name != feature) {
      throw Error(Errc::InvalidArgument, "population CV: datasets disagree on feature");
    }
    if (ds.x.cols() != dim) throw Error(Errc::DimMismatch, "population CV: dims disagree");
  }
  const std::size_t k = plan.k();
  const std::size_t n = datasets.size();

  std::vector<std::vector<std::vector<std::size_t>>> folds(n);
  std::vector<GramStats> pooled(k);
  for (std::size_t i = 0; i < n; ++i) {
    folds[i] = fold_rows(datasets[i], plan);
    for (std::size_t f = 0; f < k; ++f) {
      pooled[f].merge(GramStats::from_rows(datasets[i].x, datasets[i].y, folds[i][f]));
    }
  }

  // Validation fold 0, pooled across participants.
  std::vector<double> val_data;
  Vector y_val;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto r : folds[i][0]) {
      const auto row = datasets[i].x.row(r);
      val_data.insert(val_data.end(), row.begin(), row.end());
      y_val.push_back(datasets[i].y[r]);
    }
  }
  const Matrix x_val(y_val.size(), dim, std::move(val_data));
  const AlphaChoice choice = select_alpha(merge_except(pooled, 0), x_val, y_val, grid);

  PopulationRun run;
  run.result.scope = ProbeScope::population();
  run.result.feature_name = feature;
  run.result.alpha_used = choice.alpha;
  run.result.pca_dim = dim;
  run.per_participant.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& pr = run.per_participant[i];
    pr.scope = {ScopeKind::Population, datasets[i].participant_id};
    pr.feature_name = feature;
    pr.alpha_used = choice.alpha;
    pr.pca_dim = dim;
  }
  for (std::size_t f = 0; f < k; ++f) {
    RidgeProbe probe = fit_ridge(merge_except(pooled, f), choice.alpha);
    probe.scope = ProbeScope::population();
    probe.feature_name = feature;
    std::size_t words = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto& pr = run.per_participant[i];
      const auto& rows = folds[i][f];
      const Vector pred = predict(probe, datasets[i].x.select_rows(rows));
      pr.per_fold_rho.push_back(fold_rho(pred, gather(datasets[i].y, rows), pr.undefined_folds));
      pr.n_words_per_fold.push_back(rows.size());
      words += rows.size();
    }
    run.result.n_words_per_fold.push_back(words);
    run.fold_probes.push_back(std::move(probe));
  }
  for (auto& pr : run.per_participant) {
    finish_mean(pr);
    run.result.undefined_folds += pr.undefined_folds;
  }
  for (std::size_t f = 0; f < k; ++f) {
    double sum = 0.0;
    for (const auto& pr : run.per_participant) sum += pr.per_fold_rho[f];
    run.result.per_fold_rho.push_back(sum / static_cast<double>(n));
  }
  finish_mean(run.result);
  return run;
}

// ---------------------------------------------------------------------------
// comparison

Comparison paired_compare(std::span<const ProbeResult> person,
                          std::span<const ProbeResult> population_per_participant) {
  if (person.size() != population_per_participant.size()) {
    throw Error(Errc::InvalidArgument, "paired_compare: person and population sizes differ");
  }
  std::map<std::string, const ProbeResult*> pop_by_id;
  for (const auto& p : population_per_participant) {
    if (p.scope.kind != ScopeKind::Population) {
      throw Error(Errc::InvalidArgument, "paired_compare: expected population results");
    }
    pop_by_id[p.scope.participant_id] = &p;
  }
  std::vector<double> a, b;
  for (const auto& r : person) {
    if (r.scope.kind != ScopeKind::Person) {
      throw Error(Errc::InvalidArgument, "paired_compare: expected person results");
    }
    const auto it = pop_by_id.find(r.scope.participant_id);
    if (it == pop_by_id.end()) {
      throw Error(Errc::InvalidArgument, "paired_compare: no population score for participant '" +
                                             r.scope.participant_id + "'");
    }
    if (it->second->feature_name != r.feature_name || it->second->layer != r.layer) {
      throw Error(Errc::InvalidArgument, "paired_compare: feature/layer mismatch");
    }
    a.push_back(r.mean_rho);
    b.push_back(it->second->mean_rho);
  }
  const stats::TTest t = stats::paired_t(a, b);
  Comparison out;
  out.delta_mean = stats::mean(a) - stats::mean(b);
  out.t = t.t;
  out.p = t.p;
  out.log10_p = t.log10_p;
  out.df = t.df;
  return out;
}

// ---------------------------------------------------------------------------
// pipeline

PipelineRun run_pipeline(std::span<const AlignedDataset> datasets, const FoldPlan& plan,
                         const AlphaGrid& grid, const Executor* executor) {
  PipelineRun run;
  const Executor serial(1);
  const Executor& ex = executor != nullptr ? *executor : serial;
  run.person = ex.map<CvRun>(datasets.size(),
                             [&](std::size_t i) { return cross_validate(datasets[i], plan, grid); });
  run.population = cross_validate_population(datasets, plan, grid);
  return run;
}

std::vector<ProbeResult> person_results(const PipelineRun& run) {
  std::vector<ProbeResult> out;
  out.reserve(run.person.size());
  for (const auto& p : run.person) out.push_back(p.result);
  return out;
}

Vector mean_fold_weights(std::span<const RidgeProbe> fold_probes) {
  if (fold_probes.empty()) throw Error(Errc::MissingProbe, "mean_fold_weights: no probes");
  Vector out(fold_probes.front().weights.size(), 0.0);
  for (const auto& p : fold_probes) {
    if (p.weights.size() != out.size()) throw Error(Errc::DimMismatch, "fold weights differ in size");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += p.weights[j];
  }
  for (auto& v : out) v /= static_cast<double>(fold_probes.size());
  return out;
}

}  // namespace idioprobe
