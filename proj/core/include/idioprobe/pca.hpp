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

#include <filesystem>

#include "idioprobe/dataio.hpp"
#include "idioprobe/numerics.hpp"

namespace idioprobe {

/// Principal-components reduction fitted on the sample covariance of
/// mean-centered rows. Components are columns, sorted by explained variance;
/// each column's largest-magnitude entry is positive.
struct PcaModel {
  Vector mean;                       // dim
  Matrix components;                 // dim x d
  Vector explained_variance;         // d, descending
  Vector explained_variance_ratio;   // d, each in [0, 1]

  std::size_t input_dim() const noexcept { return mean.size(); }
  std::size_t output_dim() const noexcept { return components.cols(); }
  double retained_variance() const;

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// Throws DTooLarge unless 1 <= d <= min(rows - 1, cols), TooFewRows for
/// fewer than two rows, DegenerateData when the total variance is zero.
PcaModel fit_pca(const Matrix& data, std::size_t d);

/// (rows - mean) * components. Throws DimMismatch.
Matrix project(const PcaModel& model, const Matrix& rows);

/// Projects every embedding row; keeps model id, layer and index.
EmbeddingMatrix project(const PcaModel& model, const EmbeddingMatrix& emb);

/// PCA1 binary: "PCA1", u32 version, u32 dim, u32 d, then float64 mean,
/// components (row-major), explained variance and ratios, little-endian.
void write_pca(const PcaModel& model, const std::filesystem::path& path);
PcaModel read_pca(const std::filesystem::path& path);

}  // namespace idioprobe
