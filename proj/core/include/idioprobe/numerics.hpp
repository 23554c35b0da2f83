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

// Minimal dense linear-algebra kernel. Everything is 64-bit and row-major.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace idioprobe {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  /// Zero-filled rows x cols.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major data. Throws DimMismatch if the size is
  /// wrong and NonFinite if any entry is NaN or infinite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Vector column(std::size_t c) const;
  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
  /// First k columns.
  Matrix left_columns(std::size_t k) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Throws NonFinite if any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

struct SymEigResult {
  Vector eigenvalues;  // descending
  Matrix eigenvectors; // column k pairs with eigenvalues[k]
};

/// Full eigendecomposition of a symmetric matrix.
/// Throws NotSymmetric (beyond 1e-12 relative asymmetry) or NonFinite.
SymEigResult sym_eig(const Matrix& a);

/// Solves a x = b for symmetric positive definite a (Cholesky).
/// Throws NotPositiveDefinite when the factorization fails.
Vector solve_spd(const Matrix& a, std::span<const double> b);

/// dim x k matrix with orthonormal columns: a seeded Gaussian draw followed by
/// modified Gram-Schmidt (two passes). Bit-identical for a given seed.
Matrix orthonormal_basis(std::uint64_t seed, std::size_t dim, std::size_t k);

/// Ranks in [1, n], ties get the average of the ranks they span.
Vector rankdata(std::span<const double> x);

}  // namespace idioprobe
