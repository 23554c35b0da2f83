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

#include "idioprobe/sweep.hpp"

#include <algorithm>
#include <set>

#include "idioprobe/analyses.hpp"
#include "idioprobe/error.hpp"

namespace idioprobe {

ProjectedLayer reduce(const EmbeddingMatrix& raw, std::size_t d) {
  ProjectedLayer out;
  out.model = fit_pca(raw.values(), d);
  out.projected = project(out.model, raw);
  return out;
}

std::vector<TargetTable> filter_participants(std::span<const TargetTable> targets,
                                             std::span<const std::string> participants) {
  if (participants.empty()) return {targets.begin(), targets.end()};
  const std::set<std::string> wanted(participants.begin(), participants.end());
  std::vector<TargetTable> out;
  std::set<std::string> found;
  for (const auto& t : targets) {
    if (wanted.contains(t.participant_id())) {
      out.push_back(t);
      found.insert(t.participant_id());
    }
  }
  for (const auto& id : wanted) {
    if (!found.contains(id)) {
      throw Error(Errc::InvalidArgument, "participant '" + id + "' has no targets");
    }
  }
  return out;
}

std::vector<std::string> all_features(std::span<const TargetTable> targets) {
  std::vector<std::string> out;
  for (const auto& t : targets) {
    for (const auto& f : t.feature_names()) {
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
  }
  return out;
}

std::size_t SweepReport::probe_result_count() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.person.size() + 1;
  return n;
}

SweepCell run_cell(const CellKey& key, std::span<const AlignedDataset> datasets,
                   const FoldPlan& plan, const SweepConfig& config, const Executor* executor) {
  PipelineRun run = run_pipeline(datasets, plan, config.grid, executor);
  const int layer = static_cast<int>(key.layer);
  auto tag = [&](ProbeResult& r) {
    r.layer = layer;
    r.pca_dim = key.pca_dim;
  };
  for (auto& p : run.person) {
    tag(p.result);
    for (auto& probe : p.fold_probes) probe.layer = layer;
  }
  tag(run.population.result);
  for (auto& r : run.population.per_participant) tag(r);
  for (auto& probe : run.population.fold_probes) probe.layer = layer;

  SweepCell cell;
  cell.key = key;
  for (const auto& ds : datasets) cell.coverage.push_back(ds.coverage);
  cell.comparison = try_compare(run);

  std::vector<double> person, pop, diff;
  for (std::size_t i = 0; i < run.person.size(); ++i) {
    person.push_back(run.person[i].result.mean_rho);
    pop.push_back(run.population.per_participant[i].mean_rho);
    diff.push_back(person.back() - pop.back());
  }
  if (cell.comparison) cell.cohens_d = stats::cohens_d_paired(person, pop);
  if (diff.size() >= 2 && config.bootstrap_b > 0) {
    cell.delta_ci = stats::bootstrap_ci(diff, stats::BootstrapStat::Mean, config.bootstrap_b,
                                        config.confidence, config.bootstrap_seed);
  }
  cell.person = std::move(run.person);
  cell.population = std::move(run.population);
  return cell;
}

SweepReport layer_sweep(const SweepConfig& config, std::span<const EmbeddingMatrix> layers,
                        std::span<const TargetTable> targets, const Executor* executor) {
  if (layers.size() != config.layers.size()) {
    throw Error(Errc::InvalidArgument, "sweep: one embedding matrix per requested layer");
  }
  if (config.pca_dims.empty()) throw Error(Errc::InvalidArgument, "sweep: no PCA dims");
  const auto tables = filter_participants(targets, config.participants);
  const auto features = config.features.empty() ? all_features(tables) : config.features;

  SweepReport report;
  report.plan = plan_for_targets(tables, config.k_folds, config.fold_seed);
  report.alpha_grid = config.grid.values();
  report.bootstrap_seed = config.bootstrap_seed;
  report.bootstrap_b = config.bootstrap_b;
  report.confidence = config.confidence;
  for (const auto& t : tables) report.participants.push_back(t.participant_id());

  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (const std::size_t d : config.pca_dims) {
      const ProjectedLayer reduced = reduce(layers[l], d);
      report.pca.push_back({config.layers[l], d, layers[l].dim(), layers[l].size(),
                            reduced.model.retained_variance(),
                            reduced.model.explained_variance_ratio});
      for (const auto& feature : features) {
        const auto datasets = align_participants(reduced.projected, tables, feature);
        report.cells.push_back(
            run_cell({config.layers[l], d, feature}, datasets, report.plan, config, executor));
      }
    }
  }
  return report;
}

SweepReport layer_sweep(const SweepConfig& config, std::span<const TargetTable> targets,
                        const Executor* executor) {
  std::vector<EmbeddingMatrix> layers;
  for (const auto layer : config.layers) {
    const auto it = config.layer_files.find(layer);
    if (it == config.layer_files.end()) {
      throw Error(Errc::MissingLayerFile, "no embedding file configured for layer " +
                                              std::to_string(layer));
    }
    if (!std::filesystem::exists(it->second)) {
      throw Error(Errc::MissingLayerFile, "embedding file for layer " + std::to_string(layer) +
                                              " not found: " + it->second.string());
    }
    layers.push_back(read_embeddings(it->second));
  }
  return layer_sweep(config, layers, targets, executor);
}

}  // namespace idioprobe
