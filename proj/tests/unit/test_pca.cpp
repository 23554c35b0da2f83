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
#include "idioprobe/pca.hpp"
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

// Rows with a clear variance spectrum so eigenvectors are well separated.
oracle::Mat spread_rows(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  auto m = oracle::random_matrix(gen, n, dim);
  for (auto& r : m) {
    for (std::size_t j = 0; j < dim; ++j) r[j] = r[j] * (dim - j) + 0.3 * j;
  }
  return m;
}

Matrix from(const oracle::Mat& m) { return Matrix(m.size(), m[0].size(), oracle::flatten(m)); }

}  // namespace

TEST(Pca, MatchesJacobiOnSampleCovariance) {
  std::mt19937_64 gen(21);
  const auto rows = spread_rows(gen, 200, 6);
  const auto model = fit_pca(from(rows), 4);
  const auto want = oracle::jacobi(oracle::covariance(rows));
  double total = 0.0;
  for (const double v : want.values) total += v;
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(model.explained_variance[k], want.values[k], 1e-9 * want.values[0]);
    EXPECT_NEAR(model.explained_variance_ratio[k], want.values[k] / total, 1e-10);
    // Same axis up to sign.
    double c = 0.0;
    for (std::size_t i = 0; i < 6; ++i) c += model.components(i, k) * want.vectors[k][i];
    EXPECT_NEAR(std::abs(c), 1.0, 1e-8);
  }
}

TEST(Pca, SignConventionAndOrthonormality) {
  std::mt19937_64 gen(22);
  const auto model = fit_pca(from(spread_rows(gen, 100, 8)), 5);
  for (std::size_t k = 0; k < 5; ++k) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < 8; ++i) {
      if (std::abs(model.components(i, k)) > std::abs(model.components(arg, k))) arg = i;
    }
    EXPECT_GT(model.components(arg, k), 0.0);
    for (std::size_t l = 0; l < 5; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < 8; ++i) s += model.components(i, k) * model.components(i, l);
      EXPECT_NEAR(s, k == l ? 1.0 : 0.0, 1e-12);
    }
  }
  EXPECT_LE(model.retained_variance(), 1.0);
  EXPECT_GT(model.retained_variance(), 0.0);
}

TEST(Pca, ProjectionIsCenteredAndDecorrelated) {
  std::mt19937_64 gen(23);
  const Matrix x = from(spread_rows(gen, 150, 5));
  const auto model = fit_pca(x, 5);
  const Matrix z = project(model, x);
  EXPECT_NEAR(model.retained_variance(), 1.0, 1e-12);
  for (std::size_t a = 0; a < 5; ++a) {
    double m = 0.0;
    for (std::size_t i = 0; i < 150; ++i) m += z(i, a);
    EXPECT_NEAR(m / 150, 0.0, 1e-10);
    for (std::size_t b = a + 1; b < 5; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < 150; ++i) s += z(i, a) * z(i, b);
      EXPECT_NEAR(s / 149, 0.0, 1e-8);
    }
  }
}

TEST(Pca, ErrorCases) {
  std::mt19937_64 gen(24);
  const Matrix x = from(oracle::random_matrix(gen, 5, 8));
  EXPECT_EQ(code_of([&] { fit_pca(x, 5); }), Errc::DTooLarge);
  EXPECT_EQ(code_of([&] { fit_pca(x, 0); }), Errc::DTooLarge);
  EXPECT_EQ(code_of([&] { fit_pca(Matrix(1, 3, {1, 2, 3}), 1); }), Errc::TooFewRows);
  EXPECT_EQ(code_of([&] { fit_pca(Matrix(4, 2, {1, 1, 1, 1, 1, 1, 1, 1}), 1); }),
            Errc::DegenerateData);
  const auto model = fit_pca(x, 2);
  EXPECT_EQ(code_of([&] { project(model, Matrix(2, 3)); }), Errc::DimMismatch);
}

TEST(Pca, BinaryRoundTripIsExact) {
  std::mt19937_64 gen(25);
  const auto model = fit_pca(from(spread_rows(gen, 60, 7)), 3);
  const auto dir = oracle::temp_dir("pca_rt");
  write_pca(model, dir / "m.pca1");
  EXPECT_EQ(read_pca(dir / "m.pca1"), model);
}

TEST(Pca, ProjectEmbeddingsKeepsIndex) {
  std::mt19937_64 gen(26);
  std::vector<WordKey> keys;
  for (std::uint32_t i = 0; i < 20; ++i) keys.push_back({"c", i / 5, i % 5, "w"});
  const EmbeddingMatrix emb("m", 3, keys, from(spread_rows(gen, 20, 6)));
  const auto model = fit_pca(emb.values(), 2);
  const auto out = project(model, emb);
  EXPECT_EQ(out.index(), emb.index());
  EXPECT_EQ(out.layer(), 3u);
  EXPECT_EQ(out.dim(), 2u);
}

TEST(Pca, PointsOnALine) {
  // x = c + t * u for a unit direction u.
  const double u[3] = {2.0 / 3, -1.0 / 3, 2.0 / 3}, c[3] = {1, 2, 3};
  const double t[6] = {-2.5, -1, 0.25, 0.5, 1.75, 1};
  std::vector<double> v;
  for (const double s : t) {
    for (int j = 0; j < 3; ++j) v.push_back(c[j] + s * u[j]);
  }
  const Matrix x(6, 3, v);
  const auto model = fit_pca(x, 1);
  EXPECT_NEAR(model.explained_variance_ratio[0], 1.0, 1e-10);
  // Projections are signed distances along the line from the mean.
  const Matrix z = project(model, x);
  double mean_t = 0.0;
  for (const double s : t) mean_t += s / 6;
  const double sign = model.components(0, 0) > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(z(i, 0), sign * (t[i] - mean_t), 1e-10);
}

TEST(Pca, IsotropicRatiosAndMeanAndFullReconstruction) {
  std::mt19937_64 gen(27);
  const Matrix x = from(oracle::random_matrix(gen, 200, 4));
  const auto model = fit_pca(x, 4);
  for (const double r : model.explained_variance_ratio) EXPECT_NEAR(r, 0.25, 0.1);
  double sum = 0.0;
  for (const double r : model.explained_variance_ratio) sum += r;
  EXPECT_LE(sum, 1.0 + 1e-8);

  const Matrix zm = project(model, Matrix(1, 4, model.mean));
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(zm(0, k), 0.0, 1e-14);

  const Matrix back = multiply(project(model, x), model.components.transpose());
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(back(i, j) + model.mean[j], x(i, j), 1e-8);
  }
}
