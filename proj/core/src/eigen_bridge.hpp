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

// Zero-copy views of idioprobe containers as Eigen objects. Private to the
// core library so Eigen never leaks into the installed headers.

#include <Eigen/Dense>

#include "idioprobe/numerics.hpp"

namespace idioprobe::detail {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixView = Eigen::Map<const RowMajor>;
using MatrixView = Eigen::Map<RowMajor>;
using ConstVectorView = Eigen::Map<const Eigen::VectorXd>;
using VectorView = Eigen::Map<Eigen::VectorXd>;

inline ConstMatrixView view(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

inline MatrixView view(Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

inline ConstVectorView view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline VectorView view(std::span<double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

template <typename Derived>
Matrix to_matrix(const Eigen::MatrixBase<Derived>& m) {
  Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  view(out) = m;
  return out;
}

template <typename Derived>
Vector to_vector(const Eigen::MatrixBase<Derived>& v) {
  Vector out(static_cast<std::size_t>(v.size()));
  view(std::span<double>(out)) = v;
  return out;
}

}  // namespace idioprobe::detail
