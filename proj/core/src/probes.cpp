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

#include "idioprobe/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eigen_bridge.hpp"
#include "idioprobe/error.hpp"
#include "idioprobe/stats.hpp"

namespace idioprobe {

AlphaGrid::AlphaGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::InvalidArgument, "alpha grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw Error(Errc::InvalidArgument, "alpha grid values must be finite and > 0");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw Error(Errc::InvalidArgument, "alpha grid must be strictly increasing");
    }
  }
}

AlphaGrid AlphaGrid::standard() { return AlphaGrid({0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}); }

// ---------------------------------------------------------------------------
// GramStats

GramStats::GramStats(std::size_t dim) : mean_x_(dim, 0.0), cxx_(dim, dim), cxy_(dim, 0.0) {}

GramStats GramStats::from_rows(const Matrix& x, std::span<const double> y) {
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return from_rows(x, y, all);
}

GramStats GramStats::from_rows(const Matrix& x, std::span<const double> y,
                               std::span<const std::size_t> rows) {
  if (x.rows() != y.size()) {
    throw Error(Errc::DimMismatch, "GramStats: x has " + std::to_string(x.rows()) +
                                       " rows, y has " + std::to_string(y.size()));
  }
  const std::size_t d = x.cols();
  GramStats s(d);
  s.count_ = rows.size();
  if (rows.empty()) return s;

  const auto n = static_cast<double>(rows.size());
  for (const auto r : rows) {
    const auto xr = x.row(r);
    for (std::size_t j = 0; j < d; ++j) s.mean_x_[j] += xr[j];
    s.mean_y_ += y[r];
  }
  for (auto& m : s.mean_x_) m /= n;
  s.mean_y_ /= n;

  detail::RowMajor centered(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  Eigen::VectorXd yc(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto xr = x.row(rows[i]);
    for (std::size_t j = 0; j < d; ++j) {
      centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xr[j] - s.mean_x_[j];
    }
    yc(static_cast<Eigen::Index>(i)) = y[rows[i]] - s.mean_y_;
  }
  auto cxx = detail::view(s.cxx_);
  cxx.setZero();
  cxx.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  cxx.triangularView<Eigen::StrictlyUpper>() = cxx.transpose();
  detail::view(std::span<double>(s.cxy_)).noalias() = centered.transpose() * yc;
  return s;
}

void GramStats::merge(const GramStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.dim() != dim()) throw Error(Errc::DimMismatch, "GramStats::merge: dim mismatch");
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const std::size_t d = dim();

  Vector dx(d);
  for (std::size_t j = 0; j < d; ++j) dx[j] = other.mean_x_[j] - mean_x_[j];
  const double dy = other.mean_y_ - mean_y_;
  const double w = na * nb / n;

  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) cxx_(i, j) += other.cxx_(i, j) + w * dx[i] * dx[j];
    cxy_[i] += other.cxy_[i] + w * dx[i] * dy;
  }
  for (std::size_t j = 0; j < d; ++j) mean_x_[j] += dx[j] * nb / n;
  mean_y_ += dy * nb / n;
  count_ += other.count_;
}

// ---------------------------------------------------------------------------
// ridge

RidgeProbe fit_ridge(const GramStats& stats, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::InvalidArgument, "fit_ridge: alpha must be finite and > 0");
  }
  const std::size_t d = stats.dim();
  if (stats.count() < d + 1) {
    throw Error(Errc::TooFewRows, "fit_ridge: " + std::to_string(stats.count()) +
                                      " rows for " + std::to_string(d) + " dimensions");
  }
  Matrix system = stats.cxx();
  for (std::size_t i = 0; i < d; ++i) system(i, i) += alpha;

  RidgeProbe probe;
  probe.weights = solve_spd(system, stats.cxy());
  probe.alpha = alpha;
  probe.bias = stats.mean_y() - dot(stats.mean_x(), probe.weights);
  if (!std::isfinite(probe.bias)) throw Error(Errc::NonFinite, "fit_ridge: non-finite bias");
  return probe;
}

RidgeProbe fit_ridge(const Matrix& x, std::span<const double> y, double alpha) {
  require_finite(y, "fit_ridge targets");
  if (x.rows() != y.size()) throw Error(Errc::DimMismatch, "fit_ridge: x/y row mismatch");
  return fit_ridge(GramStats::from_rows(x, y), alpha);
}

Vector predict(const RidgeProbe& probe, const Matrix& x) {
  if (x.cols() != probe.weights.size()) {
    throw Error(Errc::DimMismatch, "predict: x has " + std::to_string(x.cols()) +
                                       " columns, probe has " +
                                       std::to_string(probe.weights.size()) + " weights");
  }
  Vector out = multiply(x, probe.weights);
  for (auto& v : out) v += probe.bias;
  return out;
}

AlphaChoice select_alpha(const GramStats& train, const Matrix& x_val,
                         std::span<const double> y_val, const AlphaGrid& grid) {
  bool found = false;
  AlphaChoice best;
  for (const double alpha : grid.values()) {
    const RidgeProbe probe = fit_ridge(train, alpha);
    const auto rho = stats::try_spearman(predict(probe, x_val), y_val);
    if (!rho) continue;
    // >= so that later (larger) alphas win ties.
    if (!found || *rho >= best.val_rho) {
      best = {alpha, *rho};
      found = true;
    }
  }
  if (!found) {
    throw Error(Errc::DegenerateValidation,
                "select_alpha: validation rho undefined for every alpha (constant targets or "
                "predictions)");
  }
  return best;
}

AlphaChoice select_alpha(const Matrix& x_train, std::span<const double> y_train,
                         const Matrix& x_val, std::span<const double> y_val,
                         const AlphaGrid& grid) {
  if (x_val.rows() == 0 || x_train.rows() == 0) {
    throw Error(Errc::InvalidArgument, "select_alpha: empty train or validation set");
  }
  return select_alpha(GramStats::from_rows(x_train, y_train), x_val, y_val, grid);
}

RidgeProbe fit_population(std::span<const AlignedDataset> datasets, double alpha) {
  if (datasets.empty()) throw Error(Errc::InvalidArgument, "fit_population: no datasets");
  GramStats pooled;
  for (const auto& ds : datasets) {
    if (ds.feature_name != datasets.front().feature_name) {
      throw Error(Errc::InvalidArgument, "fit_population: datasets disagree on feature");
    }
    require_finite(ds.y, "fit_population targets");
    pooled.merge(GramStats::from_rows(ds.x, ds.y));
  }
  RidgeProbe probe = fit_ridge(pooled, alpha);
  probe.scope = ProbeScope::population();
  probe.feature_name = datasets.front().feature_name;
  return probe;
}

}  // namespace idioprobe
