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


#include <gtest/gtest.h>

#include <set>

#include "idioprobe/error.hpp"
#include "idioprobe/evaluation.hpp"
#include "idioprobe/synth.hpp"
#include "oracles.hpp"

using namespace idioprobe;

namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no idioprobe::Error thrown";
  return Errc::InvalidArgument;
}

SynthConfig small_config() {
  SynthConfig c;
  c.n_participants = 6;
  c.n_sentences = 60;
  c.words_per_sentence = 10;
  c.dim = 8;
  c.seed = 77;
  return c;
}

std::vector<AlignedDataset> aligned(const SynthData& data, const std::string& feature) {
  std::vector<AlignedDataset> out;
  for (const auto& t : data.targets) out.push_back(align(data.embeddings, t, feature));
  return out;
}

FoldPlan plan_for(const std::vector<AlignedDataset>& ds, std::size_t k, std::uint64_t seed) {
  std::vector<SentenceKey> s;
  for (const auto& d : ds) {
    const auto more = sentences_of(d.keys);
    s.insert(s.end(), more.begin(), more.end());
  }
  return make_folds(s, k, seed);
}

std::vector<double> pick(const Vector& v, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  for (const auto r : rows) out.push_back(v[r]);
  return out;
}

oracle::Mat pick_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
  oracle::Mat out;
  for (const auto r : rows) out.emplace_back(x.row(r).begin(), x.row(r).end());
  return out;
}

double oracle_predict_rho(const oracle::Ridge& fit, const oracle::Mat& x,
                          const std::vector<double>& y) {
  std::vector<double> pred;
  for (const auto& row : x) {
    double v = fit.b;
    for (std::size_t j = 0; j < row.size(); ++j) v += fit.w[j] * row[j];
    pred.push_back(v);
  }
  return oracle::spearman_ties(pred, y);
}

}  // namespace

TEST(Folds, PartitionIsBalancedAndSeeded) {
  std::vector<SentenceKey> s;
  for (std::uint32_t i = 0; i < 53; ++i) s.push_back({"c", i});
  s.push_back({"c", 7});  // duplicates collapse
  const auto plan = make_folds(s, 5, 42);
  EXPECT_EQ(plan.assignment().size(), 53u);
  std::size_t total = 0;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto n = plan.sentences_in(f).size();
    EXPECT_TRUE(n == 10 || n == 11);
    total += n;
  }
  EXPECT_EQ(total, 53u);
  EXPECT_EQ(plan, make_folds(s, 5, 42));
  EXPECT_NE(plan, make_folds(s, 5, 43));
  EXPECT_EQ(code_of([&] { make_folds({{"c", 1}, {"c", 2}}, 5, 1); }), Errc::TooFewSentences);
  EXPECT_EQ(code_of([&] { plan.fold_of({"d", 0}); }), Errc::SentenceNotInPlan);
}

TEST(Folds, SameSentenceIdInTwoCorporaIsTwoSentences) {
  const auto plan = make_folds({{"a", 0}, {"b", 0}, {"a", 1}, {"b", 1}}, 2, 5);
  EXPECT_EQ(plan.assignment().size(), 4u);
}

TEST(Folds, NoSentenceSpansTrainAndTest) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  for (const auto& d : ds) {
    const auto folds = fold_rows(d, plan);
    std::size_t total = 0;
    for (std::size_t f = 0; f < 5; ++f) {
      total += folds[f].size();
      std::set<SentenceKey> test;
      for (const auto r : folds[f]) test.insert(sentence_of(d.keys[r]));
      for (const auto r : train_rows(folds, f)) {
        ASSERT_EQ(test.count(sentence_of(d.keys[r])), 0u);
      }
    }
    EXPECT_EQ(total, d.size());
  }
}

TEST(Folds, EmptyFoldIsReported) {
  const auto data = generate(small_config());
  auto ds = align(data.embeddings, data.targets[0], kSynthSignalFeature);
  std::map<SentenceKey, std::size_t> assignment;
  for (const auto& s : sentences_of(ds.keys)) assignment[s] = 0;
  const FoldPlan plan(2, 0, assignment);
  EXPECT_EQ(code_of([&] { fold_rows(ds, plan); }), Errc::FoldEmpty);
}

TEST(CrossValidate, MatchesIndependentRecomputation) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  const auto grid = AlphaGrid::standard();
  const auto run = cross_validate(ds[0], plan, grid);
  const auto folds = fold_rows(ds[0], plan);

  // Alpha chosen on fold 0 only.
  double best = -2.0, best_alpha = 0.0;
  const auto x_tr0 = pick_rows(ds[0].x, train_rows(folds, 0));
  const auto y_tr0 = pick(ds[0].y, train_rows(folds, 0));
  for (const double a : grid.values()) {
    const double rho = oracle_predict_rho(oracle::ridge(x_tr0, y_tr0, a),
                                          pick_rows(ds[0].x, folds[0]), pick(ds[0].y, folds[0]));
    if (rho >= best - 1e-12) {
      best = std::max(best, rho);
      best_alpha = a;
    }
  }
  EXPECT_EQ(run.result.alpha_used, best_alpha);
  EXPECT_EQ(run.result.alpha_fold, 0u);

  ASSERT_EQ(run.result.per_fold_rho.size(), 5u);
  double mean = 0.0;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto tr = train_rows(folds, f);
    const auto fit = oracle::ridge(pick_rows(ds[0].x, tr), pick(ds[0].y, tr), best_alpha);
    const double want = oracle_predict_rho(fit, pick_rows(ds[0].x, folds[f]), pick(ds[0].y, folds[f]));
    EXPECT_NEAR(run.result.per_fold_rho[f], want, 1e-9);
    EXPECT_EQ(run.result.n_words_per_fold[f], folds[f].size());
    mean += want / 5;
  }
  EXPECT_NEAR(run.result.mean_rho, mean, 1e-9);
  EXPECT_EQ(run.result.undefined_folds, 0u);
  EXPECT_EQ(run.fold_probes.size(), 5u);
}

TEST(CrossValidate, PopulationPoolsTrainingRowsPerFold) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  const auto pop = cross_validate_population(ds, plan, AlphaGrid::standard());
  ASSERT_EQ(pop.per_participant.size(), ds.size());
  const double alpha = pop.result.alpha_used;
  for (std::size_t f = 0; f < 5; ++f) {
    oracle::Mat x;
    std::vector<double> y;
    for (const auto& d : ds) {
      const auto tr = train_rows(fold_rows(d, plan), f);
      const auto xs = pick_rows(d.x, tr);
      const auto ys = pick(d.y, tr);
      x.insert(x.end(), xs.begin(), xs.end());
      y.insert(y.end(), ys.begin(), ys.end());
    }
    const auto fit = oracle::ridge(x, y, alpha);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(pop.fold_probes[f].weights[j], fit.w[j], 1e-9);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto rows = fold_rows(ds[i], plan)[f];
      const double want = oracle_predict_rho(fit, pick_rows(ds[i].x, rows), pick(ds[i].y, rows));
      EXPECT_NEAR(pop.per_participant[i].per_fold_rho[f], want, 1e-9);
      sum += want;
    }
    EXPECT_NEAR(pop.result.per_fold_rho[f], sum / ds.size(), 1e-9);
  }
}

TEST(CrossValidate, ConstantTargetsScoreZeroAndAreCounted) {
  const auto data = generate(small_config());
  auto ds = align(data.embeddings, data.targets[0], kSynthSignalFeature);
  const auto plan = plan_for({ds}, 5, 42);
  // Constant within each test fold, varying across folds so fitting works.
  const auto folds = fold_rows(ds, plan);
  for (std::size_t f = 0; f < 5; ++f) {
    for (const auto r : folds[f]) ds.y[r] = static_cast<double>(f);
  }
  EXPECT_EQ(code_of([&] { cross_validate(ds, plan, AlphaGrid::standard()); }),
            Errc::DegenerateValidation);
  std::size_t undefined = 0;
  const std::vector<double> p{1, 2, 3}, c{4, 4, 4};
  EXPECT_EQ(fold_rho(p, c, undefined), 0.0);
  EXPECT_EQ(undefined, 1u);
}

TEST(PairedCompare, MatchesPairedT) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  const auto run = run_pipeline(ds, plan, AlphaGrid::standard());
  const auto person = person_results(run);
  const auto cmp = paired_compare(person, run.population.per_participant);
  std::vector<double> d;
  for (std::size_t i = 0; i < person.size(); ++i) {
    d.push_back(person[i].mean_rho - run.population.per_participant[i].mean_rho);
  }
  double m = 0.0;
  for (const double v : d) m += v / d.size();
  EXPECT_NEAR(cmp.delta_mean, m, 1e-12);
  EXPECT_EQ(cmp.df, static_cast<double>(d.size() - 1));

  // Order of participants does not matter; ids do.
  std::vector<ProbeResult> reversed(person.rbegin(), person.rend());
  EXPECT_NEAR(paired_compare(reversed, run.population.per_participant).t, cmp.t, 1e-12);
  reversed[0].scope.participant_id = "nobody";
  EXPECT_EQ(code_of([&] { paired_compare(reversed, run.population.per_participant); }),
            Errc::InvalidArgument);
}

TEST(Pipeline, IdenticalAcrossWorkerCounts) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  const auto serial = run_pipeline(ds, plan, AlphaGrid::standard());
  for (const std::size_t threads : {2u, 4u, 8u}) {
    const Executor ex(threads);
    const auto par = run_pipeline(ds, plan, AlphaGrid::standard(), &ex);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      EXPECT_EQ(par.person[i].result.per_fold_rho, serial.person[i].result.per_fold_rho);
      EXPECT_EQ(par.person[i].fold_probes[2].weights, serial.person[i].fold_probes[2].weights);
    }
    EXPECT_EQ(par.population.result.per_fold_rho, serial.population.result.per_fold_rho);
  }
}

TEST(Executor, LowestFailingJobWins) {
  const Executor ex(4);
  try {
    ex.parallel_for(20, [](std::size_t i) {
      if (i == 13 || i == 5) throw Error(Errc::Empty, std::to_string(i));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "Empty: 5");
  }
}

TEST(Folds, SizesForTenAndElevenSentences) {
  std::vector<SentenceKey> s;
  for (std::uint32_t i = 0; i < 10; ++i) s.push_back({"c", i});
  const auto ten = make_folds(s, 5, 1);
  for (std::size_t f = 0; f < 5; ++f) EXPECT_EQ(ten.sentences_in(f).size(), 2u);
  s.push_back({"c", 10});
  const auto eleven = make_folds(s, 5, 1);
  std::multiset<std::size_t> sizes;
  for (std::size_t f = 0; f < 5; ++f) sizes.insert(eleven.sentences_in(f).size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{2, 2, 2, 2, 3}));
}

TEST(CrossValidate, NoiselessAndPureNoise) {
  auto c = small_config();
  c.noise_sd = 1e-9;
  c.pop_strength = 0.0;
  c.person_strength = 1.0;
  const auto clean = generate(c);
  const auto ds = align(clean.embeddings, clean.targets[0], kSynthSignalFeature);
  const auto plan = plan_for({ds}, 5, 3);
  EXPECT_GE(run_cv(ds, plan, AlphaGrid::standard()).mean_rho, 0.999);

  c.noise_sd = 1.0;
  c.person_strength = 0.0;
  const auto noise = generate(c);
  const auto nds = align(noise.embeddings, noise.targets[0], kSynthSignalFeature);
  const auto r = run_cv(nds, plan, AlphaGrid::standard());
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_LE(std::abs(r.per_fold_rho[f]), 3.0 / std::sqrt(double(r.n_words_per_fold[f])));
  }
}

TEST(PairedCompare, IdenticalScoresHaveZeroVariance) {
  const auto data = generate(small_config());
  const auto ds = aligned(data, kSynthSignalFeature);
  const auto plan = plan_for(ds, 5, 42);
  const auto run = run_pipeline(ds, plan, AlphaGrid::standard());
  auto same = run.population.per_participant;
  for (auto& r : same) r.scope.kind = ScopeKind::Person;
  EXPECT_EQ(code_of([&] { paired_compare(same, run.population.per_participant); }),
            Errc::ZeroVariance);
  // Person and population cells of a participant are scored on the same rows.
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(run.person[i].result.n_words_per_fold,
              run.population.per_participant[i].n_words_per_fold);
  }
}
