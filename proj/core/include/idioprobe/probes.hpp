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

// Ridge probes: one per participant, plus a population probe fitted on the
// row-concatenation of every participant's aligned data.

#include <span>
#include <string>
#include <vector>

#include "idioprobe/dataio.hpp"
#include "idioprobe/numerics.hpp"

namespace idioprobe {

/// Candidate ridge strengths, strictly increasing and positive.
class AlphaGrid {
 public:
  /// Throws InvalidArgument on an empty, unsorted or non-positive list.
  explicit AlphaGrid(std::vector<double> values);

  /// {0.01, 0.1, 1, 10, 100, 1000}
  static AlphaGrid standard();

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

enum class ScopeKind { Person, Population };

struct ProbeScope {
  ScopeKind kind = ScopeKind::Person;
  std::string participant_id;  // empty for the population probe

  static ProbeScope person(std::string id) { return {ScopeKind::Person, std::move(id)}; }
  static ProbeScope population() { return {ScopeKind::Population, {}}; }
  std::string label() const { return kind == ScopeKind::Population ? "POPULATION" : participant_id; }

  friend bool operator==(const ProbeScope&, const ProbeScope&) = default;
};

struct RidgeProbe {
  Vector weights;
  double bias = 0.0;
  double alpha = 0.0;
  ProbeScope scope;
  std::string feature_name;
  int layer = -1;
};

/// Centered sufficient statistics of (x, y) rows. Two sets merge exactly
/// (pairwise update of means and co-moments), which is how fold-train and
/// pooled population systems are assembled without touching raw rows twice.
class GramStats {
 public:
  GramStats() = default;
  explicit GramStats(std::size_t dim);

  static GramStats from_rows(const Matrix& x, std::span<const double> y);
  static GramStats from_rows(const Matrix& x, std::span<const double> y,
                             std::span<const std::size_t> rows);

  void merge(const GramStats& other);

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return mean_x_.size(); }
  const Vector& mean_x() const noexcept { return mean_x_; }
  double mean_y() const noexcept { return mean_y_; }
  /// Sum over rows of (x - mean_x)(x - mean_x)^T.
  const Matrix& cxx() const noexcept { return cxx_; }
  /// Sum over rows of (x - mean_x)(y - mean_y).
  const Vector& cxy() const noexcept { return cxy_; }

 private:
  std::size_t count_ = 0;
  Vector mean_x_;
  double mean_y_ = 0.0;
  Matrix cxx_;
  Vector cxy_;
};

/// Solves (Xc^T Xc + alpha I) beta = Xc^T yc on centered data; the bias is
/// mean(y) - mean(X) beta and is never penalized.
/// Throws TooFewRows (rows < dim + 1), InvalidArgument (alpha <= 0), NonFinite.
RidgeProbe fit_ridge(const Matrix& x, std::span<const double> y, double alpha);
RidgeProbe fit_ridge(const GramStats& stats, double alpha);

/// x * weights + bias. Throws DimMismatch.
Vector predict(const RidgeProbe& probe, const Matrix& x);

struct AlphaChoice {
  double alpha = 0.0;
  double val_rho = 0.0;
};

/// Grid value with the highest validation Spearman rho; ties go to the larger
/// alpha. Throws DegenerateValidation if no grid value yields a defined rho.
AlphaChoice select_alpha(const Matrix& x_train, std::span<const double> y_train,
                         const Matrix& x_val, std::span<const double> y_val,
                         const AlphaGrid& grid);
AlphaChoice select_alpha(const GramStats& train, const Matrix& x_val,
                         std::span<const double> y_val, const AlphaGrid& grid);

/// Ridge on the concatenation of all participants' rows; a word seen by k
/// participants contributes k rows. Throws InvalidArgument on an empty list
/// or mixed features.
RidgeProbe fit_population(std::span<const AlignedDataset> datasets, double alpha);

}  // namespace idioprobe
