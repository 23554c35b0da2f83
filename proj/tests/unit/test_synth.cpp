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

#include <cmath>

#include "idioprobe/error.hpp"
#include "idioprobe/synth.hpp"
#include "oracles.hpp"
#include "pinned_oracle.hpp"

using namespace idioprobe;

namespace {

Errc config_error(const SynthConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Empty;
}

SynthConfig small() {
  SynthConfig c;
  c.n_participants = 4;
  c.n_sentences = 100;
  c.words_per_sentence = 20;
  c.dim = 6;
  c.seed = 3;
  return c;
}

double vdot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(Synth, ReferencePreset) {
  const auto c = SynthConfig::reference();
  EXPECT_EQ(c.n_participants, 30u);
  EXPECT_EQ(c.n_sentences * c.words_per_sentence, 5000u);
  EXPECT_EQ(c.dim, 50u);
  EXPECT_EQ(c.pop_strength, 0.1);
  EXPECT_EQ(c.person_strength, 0.3);
  EXPECT_EQ(c.noise_sd, 1.0);
}

TEST(Synth, DeterministicInTheConfig) {
  const auto a = generate(small());
  const auto b = generate(small());
  EXPECT_EQ(a.embeddings, b.embeddings);
  EXPECT_EQ(a.targets, b.targets);
  auto c = small();
  c.seed = 4;
  EXPECT_NE(generate(c).targets, a.targets);
}

TEST(Synth, ShapesAndIds) {
  const auto d = generate(small());
  EXPECT_EQ(d.embeddings.size(), 2000u);
  EXPECT_EQ(d.embeddings.dim(), 6u);
  ASSERT_EQ(d.targets.size(), 4u);
  EXPECT_EQ(d.targets[0].participant_id(), "P001");
  EXPECT_EQ(d.targets[3].participant_id(), "P004");
  EXPECT_EQ(d.targets[0].feature_names(),
            (std::vector<std::string>{kSynthSignalFeature, kSynthStructuralFeature}));
  for (const auto& t : d.targets) EXPECT_EQ(t.rows().size(), 2000u);
}

TEST(Synth, DirectionsAreUnitAndOrthogonalWhenAsked) {
  auto c = small();
  c.person_dirs = PersonDirs::Orthogonal;
  const auto d = generate(c);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(vdot(d.person_directions[i], d.person_directions[i]), 1.0, 1e-12);
    EXPECT_NEAR(vdot(d.population_directions[0], d.population_directions[0]), 1.0, 1e-12);
    for (std::size_t j = i + 1; j < 4; ++j) {
      EXPECT_NEAR(vdot(d.person_directions[i], d.person_directions[j]), 0.0, 1e-12);
    }
  }
  c.person_dirs = PersonDirs::Shared;
  const auto s = generate(c);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(s.person_directions[i], s.person_directions[0]);
  EXPECT_NEAR(vdot(s.person_directions[0], s.population_directions[0]), 0.0, 1e-12);
}

TEST(Synth, RegressionRecoversPlantedWeights) {
  auto c = small();
  c.n_sentences = 1000;
  c.n_participants = 2;
  const auto d = generate(c);
  oracle::Mat x;
  for (std::size_t r = 0; r < d.embeddings.size(); ++r) {
    const auto row = d.embeddings.values().row(r);
    x.emplace_back(row.begin(), row.end());
  }
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<double> y, ys;
    for (const auto& row : d.targets[i].rows()) {
      y.push_back(*row.values[0]);
      ys.push_back(*row.values[1]);
    }
    const auto fit = oracle::ridge(x, y, 1e-9);
    const auto fit_s = oracle::ridge(x, ys, 1e-9);
    for (std::size_t j = 0; j < 6; ++j) {
      const double want = c.pop_strength * d.population_directions[0][j] +
                          c.person_strength * d.person_directions[i][j];
      EXPECT_NEAR(fit.w[j], want, 0.04);
      EXPECT_NEAR(fit_s.w[j], (c.pop_strength + c.person_strength) * d.population_directions[0][j],
                  0.04);
    }
  }
}

TEST(Synth, MissingRateAndCorpora) {
  auto c = small();
  c.missing_rate = 0.25;
  c.n_corpora = 2;
  c.corpus_dirs = CorpusDirs::Orthogonal;
  const auto d = generate(c);
  EXPECT_EQ(d.embeddings.size(), 4000u);
  EXPECT_EQ(d.targets[0].corpus_id(), synth_corpus_id(0, 2));
  EXPECT_EQ(d.targets[1].corpus_id(), synth_corpus_id(1, 2));
  EXPECT_NE(synth_corpus_id(0, 2), synth_corpus_id(1, 2));
  EXPECT_NEAR(vdot(d.population_directions[0], d.population_directions[1]), 0.0, 1e-12);
  std::size_t missing = 0, total = 0;
  for (const auto& t : d.targets) {
    for (const auto& row : t.rows()) {
      missing += !row.values[0].has_value();
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(missing) / total, 0.25, 0.02);
}

TEST(Synth, ValidationRejectsBadConfigs) {
  auto c = small();
  c.noise_sd = 0.0;
  EXPECT_EQ(config_error(c), Errc::ConfigInvalid);
  c = small();
  c.missing_rate = 1.0;
  EXPECT_EQ(config_error(c), Errc::ConfigInvalid);
  c = small();
  c.person_dirs = PersonDirs::Orthogonal;
  c.n_participants = 7;
  EXPECT_EQ(config_error(c), Errc::ConfigInvalid);
  c = small();
  c.n_corpora = 5;
  EXPECT_EQ(config_error(c), Errc::ConfigInvalid);
  EXPECT_EQ(config_error(small()), Errc::Empty);
}

TEST(SynthOracle, PersonBeatsPopulationOnlyWithAPersonComponent) {
  auto c = small();
  c.n_participants = 6;
  c.person_strength = 0.6;
  const auto with = oracle_expected_rho(c, 10);
  EXPECT_EQ(with.trials, 10u);
  EXPECT_GT(with.person, with.population + 0.05);
  c.person_strength = 0.0;
  c.pop_strength = 0.5;
  const auto without = oracle_expected_rho(c, 10);
  EXPECT_LT(without.person, without.population + 0.01);
  EXPECT_GT(without.population, 0.3);
  try {
    oracle_expected_rho(c, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigInvalid);
  }
}

TEST(SynthOracle, NoiselessAndPopulationBlindToOrthogonalPersons) {
  auto c = small();
  c.noise_sd = 1e-9;
  const auto clean = oracle_expected_rho(c, 10);
  EXPECT_GT(clean.person, 0.999);

  c.noise_sd = 1.0;
  c.pop_strength = 0.0;
  c.person_strength = 1.0;
  c.person_dirs = PersonDirs::Orthogonal;
  // The pooled fit converges to the mean person direction, which still
  // carries 1/n of each participant's direction. For Gaussian scores the
  // Pearson value is sqrt(b^2 / (n (b^2 + sigma^2))) and Spearman follows
  // as (6 / pi) asin(r / 2).
  const double r = std::sqrt(1.0 / (4.0 * 2.0));
  const double want = 6.0 / M_PI * std::asin(r / 2.0);
  EXPECT_NEAR(oracle_expected_rho(c, 10).population, want, 0.03);
}

TEST(SynthOracle, PinnedReferenceValues) {
  const auto r = oracle_expected_rho(SynthConfig::reference(), oracle::kReferenceOracleTrials);
  EXPECT_NEAR(r.person, oracle::kReferencePersonRho, 1e-6);
  EXPECT_NEAR(r.population, oracle::kReferencePopulationRho, 1e-6);
}

TEST(SynthOracle, NoPersonComponentClosesTheGapWithMoreData) {
  auto c = SynthConfig::reference();
  c.person_strength = 0.0;
  c.n_sentences = 2000;
  const auto r = oracle_expected_rho(c, 10);
  EXPECT_LT(std::abs(r.person - r.population), 0.02);
}
