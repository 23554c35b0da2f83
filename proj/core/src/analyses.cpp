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

#include "idioprobe/analyses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "idioprobe/error.hpp"
#include "idioprobe/pca.hpp"
#include "idioprobe/rng.hpp"

namespace idioprobe {

namespace {

Vector gather(std::span<const double> v, std::span<const std::size_t> rows) {
  Vector out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

const Executor& executor_or_serial(const Executor* executor, const Executor& serial) {
  return executor != nullptr ? *executor : serial;
}

std::optional<stats::TTest> try_one_sample(std::span<const double> x) {
  try {
    return stats::one_sample_t(x, 0.0);
  } catch (const Error& e) {
    if (e.code() == Errc::ZeroVariance || e.code() == Errc::TooFewSamples) return std::nullopt;
    throw;
  }
}

}  // namespace

std::vector<AlignedDataset> align_participants(const EmbeddingMatrix& projected,
                                               std::span<const TargetTable> targets,
                                               const std::string& feature) {
  bool known = false;
  std::vector<AlignedDataset> out;
  for (const auto& table : targets) {
    if (!table.feature_index(feature)) continue;
    known = true;
    try {
      out.push_back(align(projected, table, feature));
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyIntersection) throw;
    }
  }
  if (!known) throw Error(Errc::FeatureUnknown, "unknown feature '" + feature + "'");
  if (out.empty()) {
    throw Error(Errc::EmptyIntersection,
                "no participant has embedded rows for feature '" + feature + "'");
  }
  return out;
}

FoldPlan plan_for_targets(std::span<const TargetTable> targets, std::size_t k, std::uint64_t seed) {
  std::set<SentenceKey> sentences;
  for (const auto& table : targets) {
    for (const auto& row : table.rows()) sentences.insert(sentence_of(row.key));
  }
  return make_folds({sentences.begin(), sentences.end()}, k, seed);
}

double mean_person_rho(const PipelineRun& run) {
  std::vector<double> rhos;
  rhos.reserve(run.person.size());
  for (const auto& p : run.person) rhos.push_back(p.result.mean_rho);
  return stats::mean(rhos);
}

std::optional<Comparison> try_compare(const PipelineRun& run) {
  try {
    return paired_compare(person_results(run), run.population.per_participant);
  } catch (const Error& e) {
    if (e.code() == Errc::ZeroVariance || e.code() == Errc::TooFewSamples) return std::nullopt;
    throw;
  }
}

// ---------------------------------------------------------------------------
// transfer

TransferMatrix transfer_matrix(std::span<const CvRun> person,
                               std::span<const AlignedDataset> datasets, const FoldPlan& plan,
                               const Executor* executor) {
  const std::size_t n = datasets.size();
  if (person.size() != n) {
    throw Error(Errc::MissingProbe, "transfer matrix: " + std::to_string(person.size()) +
                                        " probe sets for " + std::to_string(n) + " datasets");
  }
  if (n == 0) throw Error(Errc::InvalidArgument, "transfer matrix: no participants");
  for (std::size_t i = 0; i < n; ++i) {
    if (person[i].result.scope.participant_id != datasets[i].participant_id) {
      throw Error(Errc::MissingProbe,
                  "transfer matrix: no probe for participant '" + datasets[i].participant_id + "'");
    }
    if (person[i].fold_probes.size() != plan.k()) {
      throw Error(Errc::MissingProbe, "transfer matrix: participant '" +
                                          datasets[i].participant_id + "' lacks fold probes");
    }
  }

  std::vector<std::vector<std::vector<std::size_t>>> folds(n);
  for (std::size_t j = 0; j < n; ++j) folds[j] = fold_rows(datasets[j], plan);

  const Executor serial(1);
  const auto rows = executor_or_serial(executor, serial).map<Vector>(n, [&](std::size_t i) {
    Vector row(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> per_fold;
      std::size_t undefined = 0;
      for (std::size_t f = 0; f < plan.k(); ++f) {
        const auto& test = folds[j][f];
        const Vector pred = predict(person[i].fold_probes[f], datasets[j].x.select_rows(test));
        per_fold.push_back(fold_rho(pred, gather(datasets[j].y, test), undefined));
      }
      row[j] = stats::mean(per_fold);
    }
    return row;
  });

  TransferMatrix out;
  out.rho = Matrix(n, n);
  std::vector<double> self(n), other(n);
  double off_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.participant_ids.push_back(datasets[i].participant_id);
    double row_off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out.rho(i, j) = rows[i][j];
      if (j != i) row_off += rows[i][j];
    }
    self[i] = rows[i][i];
    off_sum += row_off;
    if (n > 1) other[i] = row_off / static_cast<double>(n - 1);
  }
  out.self_mean = stats::mean(self);
  if (n > 1) {
    out.other_mean = off_sum / static_cast<double>(n * (n - 1));
    try {
      const stats::TTest t = stats::paired_t(self, other);
      out.self_vs_other = Comparison{stats::mean(self) - stats::mean(other), t.t, t.p, t.log10_p,
                                     t.df};
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroVariance && e.code() != Errc::TooFewSamples) throw;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// split-half

namespace {

/// Consecutive sentence runs of rows already in session order.
std::vector<std::vector<std::size_t>> sentence_runs(const AlignedDataset& ds,
                                                    std::span<const std::size_t> order) {
  std::vector<std::vector<std::size_t>> runs;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const std::size_t r = order[idx];
    if (idx == 0 || sentence_of(ds.keys[order[idx - 1]]) != sentence_of(ds.keys[r])) {
      runs.emplace_back();
    }
    runs.back().push_back(r);
  }
  return runs;
}

std::vector<std::size_t> flatten(std::span<const std::vector<std::size_t>> runs) {
  std::vector<std::size_t> out;
  for (const auto& run : runs) out.insert(out.end(), run.begin(), run.end());
  return out;
}

Vector fit_half(const AlignedDataset& ds, std::span<const std::vector<std::size_t>> runs,
                const AlphaGrid& grid) {
  const std::size_t n_train = std::max<std::size_t>(1, (runs.size() * 4) / 5);
  if (n_train >= runs.size()) {
    throw Error(Errc::TooFewRows, "split-half: participant '" + ds.participant_id +
                                      "' has too few sentences for a validation split");
  }
  const auto train = flatten(runs.first(n_train));
  const auto val = flatten(runs.subspan(n_train));
  const auto all = flatten(runs);
  const Matrix x_train = ds.x.select_rows(train);
  const AlphaChoice choice = select_alpha(x_train, gather(ds.y, train), ds.x.select_rows(val),
                                          gather(ds.y, val), grid);
  return fit_ridge(ds.x.select_rows(all), gather(ds.y, all), choice.alpha).weights;
}

}  // namespace

double split_half(const AlignedDataset& ds, const AlphaGrid& grid) {
  const std::size_t need = 2 * (ds.x.cols() + 1);
  if (ds.size() < need) {
    throw Error(Errc::TooFewRows, "split-half: participant '" + ds.participant_id + "' has " +
                                      std::to_string(ds.size()) + " rows, needs " +
                                      std::to_string(need));
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  const WordKeyLess less;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return less(ds.keys[a], ds.keys[b]); });
  const auto runs = sentence_runs(ds, order);
  if (runs.size() < 2) {
    throw Error(Errc::TooFewRows, "split-half: participant '" + ds.participant_id +
                                      "' has a single sentence");
  }
  const std::span<const std::vector<std::size_t>> all(runs);
  const std::size_t half = runs.size() / 2;
  const Vector first = fit_half(ds, all.first(half), grid);
  const Vector second = fit_half(ds, all.subspan(half), grid);
  return stats::cosine(first, second);
}

SplitHalfSummary split_half_all(std::span<const AlignedDataset> datasets, const AlphaGrid& grid,
                                const Executor* executor) {
  const Executor serial(1);
  SplitHalfSummary out;
  out.cosines = executor_or_serial(executor, serial).map<double>(
      datasets.size(), [&](std::size_t i) { return split_half(datasets[i], grid); });
  for (const auto& ds : datasets) out.participant_ids.push_back(ds.participant_id);
  out.mean_cosine = stats::mean(out.cosines);
  out.versus_zero = try_one_sample(out.cosines);
  return out;
}

// ---------------------------------------------------------------------------
// residual independence

ProbeResult residual_independence(const CvRun& person, const PopulationRun& population,
                                  const AlignedDataset& ds, const FoldPlan& plan,
                                  ResidualMode mode) {
  const auto folds = fold_rows(ds, plan);
  if (person.fold_probes.size() != folds.size() || population.fold_probes.size() != folds.size()) {
    throw Error(Errc::MissingProbe, "residual independence: fold probes do not match the plan");
  }
  ProbeResult r;
  r.scope = ProbeScope::person(ds.participant_id);
  r.feature_name = ds.feature_name;
  r.layer = person.result.layer;
  r.pca_dim = ds.x.cols();
  r.alpha_used = person.result.alpha_used;
  r.alpha_fold = person.result.alpha_fold;

  // Residual target on every row, per fold of the population probe.
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& test = folds[f];
    const Matrix x_test = ds.x.select_rows(test);
    const Vector pop_test = predict(population.fold_probes[f], x_test);
    Vector resid_test = gather(ds.y, test);
    for (std::size_t i = 0; i < resid_test.size(); ++i) resid_test[i] -= pop_test[i];

    RidgeProbe probe = person.fold_probes[f];
    if (mode == ResidualMode::Retrain) {
      const auto train = train_rows(folds, f);
      const Matrix x_train = ds.x.select_rows(train);
      const Vector pop_train = predict(population.fold_probes[f], x_train);
      Vector resid_train = gather(ds.y, train);
      for (std::size_t i = 0; i < resid_train.size(); ++i) resid_train[i] -= pop_train[i];
      probe = fit_ridge(x_train, resid_train, person.result.alpha_used);
    }
    const Vector pred = predict(probe, x_test);
    r.per_fold_rho.push_back(fold_rho(pred, resid_test, r.undefined_folds));
    r.n_words_per_fold.push_back(test.size());
  }
  r.mean_rho = stats::mean(r.per_fold_rho);
  return r;
}

ResidualSummary residual_summary(const PipelineRun& run, std::span<const AlignedDataset> datasets,
                                 const FoldPlan& plan, ResidualMode mode) {
  if (run.person.size() != datasets.size()) {
    throw Error(Errc::MissingProbe, "residual summary: probe and dataset counts differ");
  }
  ResidualSummary out;
  out.mode = mode;
  std::vector<double> rhos;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    out.per_participant.push_back(
        residual_independence(run.person[i], run.population, datasets[i], plan, mode));
    rhos.push_back(out.per_participant.back().mean_rho);
  }
  out.mean_rho = stats::mean(rhos);
  out.unresidualized_rho = mean_person_rho(run);
  out.versus_zero = try_one_sample(rhos);
  return out;
}

// ---------------------------------------------------------------------------
// confounds

ConfoundResidualization residualize_confounds(const TargetTable& table,
                                              const std::string& feature) {
  const auto fi = table.feature_index(feature);
  if (!fi) {
    throw Error(Errc::FeatureUnknown, "participant '" + table.participant_id() +
                                          "': unknown feature '" + feature + "'");
  }
  std::vector<std::size_t> present;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    if (table.rows()[r].values[*fi]) present.push_back(r);
  }
  const std::size_t n = present.size();
  if (n <= kConfoundCount + 1) {
    throw Error(Errc::TooFewRows, "participant '" + table.participant_id() + "': " +
                                      std::to_string(n) + " rows for confound regression");
  }

  std::vector<Vector> columns(kConfoundCount + 1, Vector(n));
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TargetRow& row = table.rows()[present[i]];
    const Confounds& c = *row.confounds;  // guaranteed by TargetTable for rows with values
    columns[0][i] = 1.0;
    columns[1][i] = c.freq_log;
    columns[2][i] = c.length;
    columns[3][i] = c.sent_position;
    columns[4][i] = c.surprisal;
    y[i] = *row.values[*fi];
  }

  ConfoundResidualization out;
  out.n_rows = n;

  // Orthonormal basis of the kept design columns (modified Gram-Schmidt,
  // two passes); a column whose remainder vanishes is collinear and dropped.
  std::vector<Vector> basis;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    Vector v = columns[c];
    const double original = norm(v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double proj = dot(q, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q[i];
      }
    }
    const double remaining = norm(v);
    if (original == 0.0 || remaining <= 1e-10 * original) {
      if (c > 0) out.dropped_confounds.emplace_back(kConfoundNames[c - 1]);
      continue;
    }
    for (auto& e : v) e /= remaining;
    basis.push_back(std::move(v));
  }

  Vector resid = y;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double proj = dot(q, resid);
      for (std::size_t i = 0; i < n; ++i) resid[i] -= proj * q[i];
    }
  }

  const double y_mean = stats::mean(y);
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
    ss_res += resid[i] * resid[i];
  }
  out.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;

  std::vector<TargetRow> rows = table.rows();
  for (std::size_t i = 0; i < n; ++i) rows[present[i]].values[*fi] = resid[i];
  out.table = TargetTable(table.participant_id(), table.corpus_id(), table.feature_names(),
                          std::move(rows));
  return out;
}

ConfoundControl confound_control(const EmbeddingMatrix& projected,
                                 std::span<const TargetTable> targets, const std::string& feature,
                                 const FoldPlan& plan, const AlphaGrid& grid,
                                 const Executor* executor) {
  ConfoundControl out;
  out.feature = feature;

  const auto raw = align_participants(projected, targets, feature);
  const PipelineRun raw_run = run_pipeline(raw, plan, grid, executor);
  out.person_raw = mean_person_rho(raw_run);
  out.pop_raw = raw_run.population.result.mean_rho;

  std::vector<TargetTable> residualized;
  for (const auto& table : targets) {
    if (!table.feature_index(feature)) continue;
    auto res = residualize_confounds(table, feature);
    for (const auto& name : res.dropped_confounds) {
      out.warnings.push_back("participant '" + table.participant_id() +
                             "': dropped collinear confound '" + name + "'");
    }
    out.r_squared.push_back(res.r_squared);
    residualized.push_back(std::move(res.table));
  }
  out.mean_r_squared = stats::mean(out.r_squared);

  const auto res_data = align_participants(projected, residualized, feature);
  const PipelineRun res_run = run_pipeline(res_data, plan, grid, executor);
  out.person_residualized = mean_person_rho(res_run);
  out.pop_residualized = res_run.population.result.mean_rho;
  out.residualized_comparison = try_compare(res_run);
  return out;
}

// ---------------------------------------------------------------------------
// controls

std::string_view to_string(ControlKind kind) noexcept {
  switch (kind) {
    case ControlKind::Shuffle: return "SHUFFLE";
    case ControlKind::RandomProjection: return "RANDOM_PROJECTION";
    case ControlKind::RandomEmbedding: return "RANDOM_EMBEDDING";
    case ControlKind::StaticEmbedding: return "STATIC_EMBEDDING";
    case ControlKind::NegativeFeature: return "NEGATIVE_FEATURE";
  }
  return "UNKNOWN";
}

ControlKind parse_control_kind(std::string_view name) {
  std::string upper(name);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const auto kind : {ControlKind::Shuffle, ControlKind::RandomProjection,
                          ControlKind::RandomEmbedding, ControlKind::StaticEmbedding,
                          ControlKind::NegativeFeature}) {
    if (upper == to_string(kind)) return kind;
  }
  throw Error(Errc::InvalidArgument, "unknown control kind '" + std::string(name) + "'");
}

namespace {

void fill_outcome(ControlOutcome& out, const PipelineRun& run) {
  out.person_rho = mean_person_rho(run);
  out.pop_rho = run.population.result.mean_rho;
  out.delta = out.person_rho - out.pop_rho;
  if (const auto cmp = try_compare(run)) out.p = cmp->p;
}

EmbeddingMatrix random_embedding(const EmbeddingMatrix& like, std::size_t dim,
                                 std::uint64_t seed) {
  Matrix values(like.size(), dim);
  for (std::size_t r = 0; r < like.size(); ++r) {
    const WordKey& k = like.index()[r];
    const std::string identity = k.corpus_id + '\x1f' + std::to_string(k.sentence_id) + '\x1f' +
                                 std::to_string(k.word_pos);
    Rng rng(derive_seed(seed, hash_string(identity)));
    for (std::size_t c = 0; c < dim; ++c) values(r, c) = rng.normal();
  }
  return EmbeddingMatrix(like.model_id() + "+random", like.layer(), like.index(),
                         std::move(values));
}

}  // namespace

ControlOutcome run_control(ControlKind kind, const ControlInputs& in) {
  if (in.plan == nullptr || in.grid == nullptr) {
    throw Error(Errc::InvalidArgument, "control: fold plan and alpha grid are required");
  }
  const bool needs_layer = kind != ControlKind::StaticEmbedding;
  if (needs_layer && in.embeddings == nullptr) {
    throw Error(Errc::InvalidArgument, "control: layer embeddings are required");
  }
  ControlOutcome out;
  out.kind = kind;

  auto run_on = [&](const EmbeddingMatrix& projected, const std::string& feature) {
    const auto data = align_participants(projected, in.targets, feature);
    return run_pipeline(data, *in.plan, *in.grid, in.executor);
  };

  switch (kind) {
    case ControlKind::Shuffle: {
      if (in.n_permutations == 0) {
        throw Error(Errc::InvalidArgument, "control SHUFFLE: n_permutations must be >= 1");
      }
      const PcaModel pca = fit_pca(in.embeddings->values(), in.pca_dim);
      const auto base = align_participants(project(pca, *in.embeddings), in.targets, in.feature);
      std::vector<double> person, pop;
      for (std::size_t p = 0; p < in.n_permutations; ++p) {
        const std::uint64_t perm_seed = derive_seed(in.seed, p);
        auto shuffled = base;
        for (std::size_t i = 0; i < shuffled.size(); ++i) {
          Rng rng(derive_seed(perm_seed, i));
          rng.shuffle(std::span<double>(shuffled[i].y));
        }
        const PipelineRun run = run_pipeline(shuffled, *in.plan, *in.grid, in.executor);
        person.push_back(mean_person_rho(run));
        pop.push_back(run.population.result.mean_rho);
        out.permutation_deltas.push_back(person.back() - pop.back());
      }
      out.person_rho = stats::mean(person);
      out.pop_rho = stats::mean(pop);
      out.delta = out.person_rho - out.pop_rho;
      out.n_permutations = in.n_permutations;
      out.detail = "targets permuted within participant";
      break;
    }
    case ControlKind::RandomProjection: {
      PcaModel model = fit_pca(in.embeddings->values(), in.pca_dim);
      model.components = orthonormal_basis(in.seed, in.embeddings->dim(), in.pca_dim);
      fill_outcome(out, run_on(project(model, *in.embeddings), in.feature));
      out.detail = "PCA components replaced by " + std::to_string(in.pca_dim) +
                   " random orthonormal directions";
      break;
    }
    case ControlKind::RandomEmbedding: {
      fill_outcome(out, run_on(random_embedding(*in.embeddings, in.pca_dim, in.seed), in.feature));
      out.detail = "fixed seeded Gaussian vector per word occurrence";
      break;
    }
    case ControlKind::StaticEmbedding: {
      if (in.static_embeddings == nullptr) {
        throw Error(Errc::InvalidArgument, "control STATIC_EMBEDDING: no static embedding file");
      }
      const EmbeddingMatrix& st = *in.static_embeddings;
      if (st.dim() > in.pca_dim) {
        const std::size_t d = std::min(in.pca_dim, st.size() - 1);
        fill_outcome(out, run_on(project(fit_pca(st.values(), d), st), in.feature));
        out.detail = "static embeddings reduced to " + std::to_string(d) + " dims";
      } else {
        fill_outcome(out, run_on(st, in.feature));
        out.detail = "static embeddings used at native dim " + std::to_string(st.dim());
      }
      break;
    }
    case ControlKind::NegativeFeature: {
      if (in.negative_feature.empty()) {
        throw Error(Errc::InvalidArgument, "control NEGATIVE_FEATURE: no feature named");
      }
      const PcaModel pca = fit_pca(in.embeddings->values(), in.pca_dim);
      fill_outcome(out, run_on(project(pca, *in.embeddings), in.negative_feature));
      out.detail = "feature '" + in.negative_feature + "'";
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// cross-corpus transfer

CrossDatasetResult cross_dataset_transfer(std::span<const AlignedDataset> datasets,
                                          const std::string& train_corpus,
                                          const std::string& test_corpus, const FoldPlan& plan,
                                          const AlphaGrid& grid) {
  std::vector<AlignedDataset> train, test;
  for (const auto& ds : datasets) {
    if (ds.corpus_id == train_corpus) train.push_back(ds);
    if (ds.corpus_id == test_corpus) test.push_back(ds);
  }
  if (train.empty()) throw Error(Errc::CorpusMissing, "corpus '" + train_corpus + "' has no data");
  if (test.empty()) throw Error(Errc::CorpusMissing, "corpus '" + test_corpus + "' has no data");

  CrossDatasetResult out;
  out.train_corpus = train_corpus;
  out.test_corpus = test_corpus;
  out.feature = test.front().feature_name;
  out.within_rho = cross_validate_population(test, plan, grid).result.mean_rho;

  out.alpha_used = cross_validate_population(train, plan, grid).result.alpha_used;
  const RidgeProbe probe = fit_population(train, out.alpha_used);
  std::vector<double> rhos;
  std::size_t undefined = 0;
  for (const auto& ds : test) rhos.push_back(fold_rho(predict(probe, ds.x), ds.y, undefined));
  out.cross_rho = stats::mean(rhos);
  if (out.within_rho != 0.0) out.retention = out.cross_rho / out.within_rho;
  return out;
}

// ---------------------------------------------------------------------------
// weight geometry

WeightGeometry weight_geometry(std::span<const CvRun> person, const PopulationRun& population) {
  if (person.size() < 2) {
    throw Error(Errc::InvalidArgument, "weight geometry needs at least two person probes");
  }
  std::vector<Vector> w;
  for (const auto& p : person) w.push_back(mean_fold_weights(p.fold_probes));
  const Vector pop = mean_fold_weights(population.fold_probes);
  for (const auto& v : w) {
    if (v.size() != pop.size()) throw Error(Errc::DimMismatch, "weight geometry: dims differ");
  }
  WeightGeometry out;
  double pair_sum = 0.0, pop_sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    pop_sum += stats::cosine(w[i], pop);
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      pair_sum += stats::cosine(w[i], w[j]);
      ++out.n_pairs;
    }
  }
  out.mean_pairwise_cosine = pair_sum / static_cast<double>(out.n_pairs);
  out.mean_cosine_to_population = pop_sum / static_cast<double>(w.size());
  return out;
}

}  // namespace idioprobe
