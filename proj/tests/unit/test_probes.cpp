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
#include <random>

#include "idioprobe/error.hpp"
#include "idioprobe/probes.hpp"
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

Matrix from(const oracle::Mat& m) { return Matrix(m.size(), m[0].size(), oracle::flatten(m)); }

struct Problem {
  oracle::Mat x;
  std::vector<double> y;
};

Problem linear_problem(std::mt19937_64& gen, std::size_t n, std::size_t d, double noise) {
  std::normal_distribution<double> nd;
  Problem p{oracle::random_matrix(gen, n, d), std::vector<double>(n)};
  std::vector<double> w(d);
  for (auto& v : w) v = nd(gen);
  for (std::size_t i = 0; i < n; ++i) {
    p.y[i] = 3.0 + noise * nd(gen);
    for (std::size_t j = 0; j < d; ++j) {
      p.x[i][j] += 0.5 * j;  // off-center columns exercise the bias
      p.y[i] += w[j] * p.x[i][j];
    }
  }
  return p;
}

AlignedDataset dataset(const Problem& p, const std::string& id, const std::string& feature) {
  AlignedDataset ds;
  ds.x = from(p.x);
  ds.y = p.y;
  for (std::uint32_t i = 0; i < p.y.size(); ++i) ds.keys.push_back({"c", i / 10, i % 10, "w"});
  ds.participant_id = id;
  ds.corpus_id = "c";
  ds.feature_name = feature;
  ds.coverage = 1.0;
  return ds;
}

}  // namespace

TEST(FitRidge, MatchesExplicitInverseOracle) {
  std::mt19937_64 gen(41);
  std::uniform_int_distribution<std::size_t> dd(1, 10);
  std::uniform_real_distribution<double> la(-2.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = dd(gen);
    const auto p = linear_problem(gen, d + 5 + trial % 40, d, 0.7);
    const double alpha = std::pow(10.0, la(gen));
    const auto got = fit_ridge(from(p.x), p.y, alpha);
    const auto want = oracle::ridge(p.x, p.y, alpha);
    for (std::size_t j = 0; j < d; ++j) {
      ASSERT_NEAR(got.weights[j], want.w[j], 1e-8 * (1.0 + std::abs(want.w[j])));
    }
    ASSERT_NEAR(got.bias, want.b, 1e-8 * (1.0 + std::abs(want.b)));
    EXPECT_EQ(got.alpha, alpha);
  }
}

TEST(FitRidge, ShrinksTowardZeroAndPredictsTheMean) {
  std::mt19937_64 gen(42);
  const auto p = linear_problem(gen, 80, 4, 0.1);
  const auto huge = fit_ridge(from(p.x), p.y, 1e12);
  double mean_y = 0.0;
  for (const double v : p.y) mean_y += v / 80;
  for (const double w : huge.weights) EXPECT_NEAR(w, 0.0, 1e-6);
  const auto pred = predict(huge, from(p.x));
  for (const double v : pred) EXPECT_NEAR(v, mean_y, 1e-4);
}

TEST(FitRidge, Errors) {
  std::mt19937_64 gen(43);
  const auto p = linear_problem(gen, 4, 4, 0.1);
  EXPECT_EQ(code_of([&] { fit_ridge(from(p.x), p.y, 1.0); }), Errc::TooFewRows);
  const auto q = linear_problem(gen, 20, 3, 0.1);
  EXPECT_EQ(code_of([&] { fit_ridge(from(q.x), q.y, 0.0); }), Errc::InvalidArgument);
  const auto probe = fit_ridge(from(q.x), q.y, 1.0);
  EXPECT_EQ(code_of([&] { predict(probe, Matrix(2, 2)); }), Errc::DimMismatch);
}

TEST(GramStats, MergeEqualsWholeAndOrderDoesNotMatter) {
  std::mt19937_64 gen(44);
  const auto p = linear_problem(gen, 90, 5, 1.0);
  const Matrix x = from(p.x);
  std::vector<std::size_t> a, b, c;
  for (std::size_t i = 0; i < 90; ++i) (i % 3 == 0 ? a : i % 3 == 1 ? b : c).push_back(i);
  auto ga = GramStats::from_rows(x, p.y, a);
  auto gc = GramStats::from_rows(x, p.y, c);
  ga.merge(GramStats::from_rows(x, p.y, b));
  ga.merge(gc);
  const auto whole = GramStats::from_rows(x, p.y);
  ASSERT_EQ(ga.count(), 90u);
  EXPECT_NEAR(ga.mean_y(), whole.mean_y(), 1e-12);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(ga.mean_x()[i], whole.mean_x()[i], 1e-12);
    EXPECT_NEAR(ga.cxy()[i], whole.cxy()[i], 1e-9);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(ga.cxx()(i, j), whole.cxx()(i, j), 1e-9);
  }
  const auto r1 = fit_ridge(ga, 2.0);
  const auto r2 = fit_ridge(x, p.y, 2.0);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(r1.weights[j], r2.weights[j], 1e-10);

  GramStats empty(5);
  empty.merge(whole);
  EXPECT_EQ(empty.count(), 90u);
  EXPECT_NEAR(empty.mean_y(), whole.mean_y(), 1e-15);
}

TEST(SelectAlpha, PicksBestAndBreaksTiesTowardLarger) {
  std::mt19937_64 gen(45);
  const auto train = linear_problem(gen, 200, 3, 0.1);
  const auto val = linear_problem(gen, 50, 3, 0.1);
  const auto grid = AlphaGrid::standard();
  const auto choice = select_alpha(from(train.x), train.y, from(val.x), val.y, grid);
  double best = -2.0;
  for (const double a : grid.values()) {
    const auto pred = predict(fit_ridge(from(train.x), train.y, a), from(val.x));
    best = std::max(best, oracle::spearman_ties(pred, val.y));
  }
  EXPECT_NEAR(choice.val_rho, best, 1e-12);

  // One feature: every alpha gives the same ranking, so the tie resolves to
  // the largest grid value.
  const auto t1 = linear_problem(gen, 60, 1, 0.5);
  const auto v1 = linear_problem(gen, 30, 1, 0.5);
  const auto tie = select_alpha(from(t1.x), t1.y, from(v1.x), v1.y, grid);
  EXPECT_EQ(tie.alpha, grid.values().back());
}

TEST(SelectAlpha, DegenerateValidation) {
  std::mt19937_64 gen(46);
  const auto t = linear_problem(gen, 40, 2, 0.5);
  const auto v = linear_problem(gen, 10, 2, 0.5);
  const std::vector<double> flat(10, 1.0);
  EXPECT_EQ(code_of([&] {
              select_alpha(from(t.x), t.y, from(v.x), flat, AlphaGrid::standard());
            }),
            Errc::DegenerateValidation);
}

TEST(AlphaGrid, Validation) {
  EXPECT_EQ(AlphaGrid::standard().values(),
            (std::vector<double>{0.01, 0.1, 1, 10, 100, 1000}));
  EXPECT_EQ(code_of([] { AlphaGrid({}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { AlphaGrid({1, 1}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { AlphaGrid({0, 1}); }), Errc::InvalidArgument);
}

TEST(FitPopulation, EqualsRidgeOnConcatenatedRows) {
  std::mt19937_64 gen(47);
  const auto a = linear_problem(gen, 30, 3, 1.0);
  const auto b = linear_problem(gen, 50, 3, 1.0);
  const std::vector<AlignedDataset> ds{dataset(a, "P1", "f"), dataset(b, "P2", "f")};
  oracle::Mat x = a.x;
  x.insert(x.end(), b.x.begin(), b.x.end());
  std::vector<double> y = a.y;
  y.insert(y.end(), b.y.begin(), b.y.end());
  const auto pop = fit_population(ds, 5.0);
  const auto want = oracle::ridge(x, y, 5.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(pop.weights[j], want.w[j], 1e-9);
  EXPECT_NEAR(pop.bias, want.b, 1e-9);
  EXPECT_EQ(pop.scope, ProbeScope::population());

  EXPECT_EQ(code_of([] { fit_population({}, 1.0); }), Errc::InvalidArgument);
  const std::vector<AlignedDataset> mixed{dataset(a, "P1", "f"), dataset(b, "P2", "g")};
  EXPECT_EQ(code_of([&] { fit_population(mixed, 1.0); }), Errc::InvalidArgument);
}

TEST(FitRidge, NoiselessRecoveryAndHeavyShrinkage) {
  std::mt19937_64 gen(7);
  const auto x = oracle::random_matrix(gen, 60, 4);
  const std::vector<double> w{1.5, -2, 0.25, 3};
  std::vector<double> y(60, -0.5);
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t j = 0; j < 4; ++j) y[i] += w[j] * x[i][j];
  }
  const auto exact = fit_ridge(from(x), y, 1e-12);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(exact.weights[j], w[j], 1e-6);
  EXPECT_NEAR(exact.bias, -0.5, 1e-6);
  const auto pred = predict(exact, from(x));
  for (std::size_t i = 0; i < 60; ++i) EXPECT_NEAR(pred[i], y[i], 1e-6);

  const double light = norm(fit_ridge(from(x), y, 0.01).weights);
  EXPECT_LE(norm(fit_ridge(from(x), y, 1e12).weights), 1e-6 * light);
}

TEST(FitRidge, OneDimensionalClosedForm) {
  // x = {-1, 0, 1}, y = x: beta = sum(x y) / (sum(x^2) + alpha) = 2 / 6.
  const auto p = fit_ridge(Matrix(3, 1, {-1, 0, 1}), std::vector<double>{-1, 0, 1}, 4.0);
  EXPECT_NEAR(p.weights[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.bias, 0.0, 1e-15);
}

TEST(Predict, BiasOnlyAndLinearity) {
  RidgeProbe p;
  p.weights = {0, 0};
  p.bias = 1.75;
  EXPECT_EQ(predict(p, Matrix(2, 2, {1, 2, 3, 4})), (Vector{1.75, 1.75}));
  p.weights = {2, -1};
  p.bias = 0;
  const Matrix a(1, 2, {1, 3}), b(1, 2, {-2, 5}), ab(1, 2, {2 * 1 + 3 * -2, 2 * 3 + 3 * 5});
  EXPECT_NEAR(predict(p, ab)[0], 2 * predict(p, a)[0] + 3 * predict(p, b)[0], 1e-12);
}

TEST(SelectAlpha, NoiselessMatchesBruteForceGrid) {
  std::mt19937_64 gen(8);
  const auto train = linear_problem(gen, 80, 5, 0.0);
  const auto fit = oracle::ridge(train.x, train.y, 1e-10);
  const auto vx = oracle::random_matrix(gen, 40, 5);
  std::vector<double> vy(40);
  for (std::size_t i = 0; i < 40; ++i) {
    vy[i] = fit.b;
    for (std::size_t j = 0; j < 5; ++j) vy[i] += fit.w[j] * vx[i][j];
  }
  // Several grid values rank the validation rows perfectly; the tie goes to
  // the largest of them.
  double best_alpha = 0.0, best_rho = -2.0;
  for (const double a : AlphaGrid::standard().values()) {
    const auto r = oracle::ridge(train.x, train.y, a);
    std::vector<double> pred(40);
    for (std::size_t i = 0; i < 40; ++i) {
      pred[i] = r.b;
      for (std::size_t j = 0; j < 5; ++j) pred[i] += r.w[j] * vx[i][j];
    }
    const double rho = oracle::spearman_ties(pred, vy);
    if (rho >= best_rho - 1e-12) {
      best_rho = std::max(best_rho, rho);
      best_alpha = a;
    }
  }
  EXPECT_EQ(best_rho, 1.0);
  const auto c = select_alpha(from(train.x), train.y, from(vx), vy, AlphaGrid::standard());
  EXPECT_EQ(c.alpha, best_alpha);
  EXPECT_EQ(c.val_rho, 1.0);
}

TEST(FitPopulation, SingleAndDuplicatedParticipants) {
  std::mt19937_64 gen(9);
  const auto p = linear_problem(gen, 50, 3, 0.3);
  const std::vector<AlignedDataset> one{dataset(p, "P1", "f")};
  const auto solo = fit_population(one, 1.0);
  const auto direct = fit_ridge(from(p.x), p.y, 1.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(solo.weights[j], direct.weights[j], 1e-12);
  EXPECT_NEAR(solo.bias, direct.bias, 1e-12);

  // Duplicating the same rows doubles the Gram matrix; with alpha doubled
  // the solution is unchanged.
  const std::vector<AlignedDataset> two{dataset(p, "P1", "f"), dataset(p, "P2", "f")};
  const auto dup = fit_population(two, 2.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(dup.weights[j], direct.weights[j], 1e-12);
}

TEST(FitPopulation, OpposedParticipantsCancel) {
  std::mt19937_64 gen(10);
  auto x = oracle::random_matrix(gen, 400, 2);
  Problem plus{x, std::vector<double>(400)}, minus{x, std::vector<double>(400)};
  for (std::size_t i = 0; i < 400; ++i) {
    plus.y[i] = x[i][0] - 2 * x[i][1];
    minus.y[i] = -plus.y[i];
  }
  const std::vector<AlignedDataset> ds{dataset(plus, "P1", "f"), dataset(minus, "P2", "f")};
  const auto pooled = fit_population(ds, 0.01);
  EXPECT_LT(norm(pooled.weights), 1e-10);
}
