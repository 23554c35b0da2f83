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

#include "idioprobe/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eigen_bridge.hpp"
#include "idioprobe/error.hpp"
#include "idioprobe/rng.hpp"

namespace idioprobe {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(Errc::DimMismatch, "matrix data has " + std::to_string(data_.size()) +
                                       " values, expected " + std::to_string(rows) + "x" +
                                       std::to_string(cols));
  }
  require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::left_columns(std::size_t k) const {
  Matrix out(rows_, k);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto src = row(r);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(k), out.row(r).begin());
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(Errc::DimMismatch, "multiply: inner dimensions " + std::to_string(a.cols()) +
                                       " and " + std::to_string(b.rows()));
  }
  Matrix out(a.rows(), b.cols());
  detail::view(out).noalias() = detail::view(a) * detail::view(b);
  return out;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(Errc::DimMismatch, "multiply: matrix has " + std::to_string(a.cols()) +
                                       " columns, vector has " + std::to_string(x.size()));
  }
  Vector out(a.rows());
  detail::view(std::span<double>(out)).noalias() = detail::view(a) * detail::view(x);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimMismatch, "dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::NonFinite,
                  std::string(what) + ": non-finite value at position " + std::to_string(i));
    }
  }
}

SymEigResult sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::NotSymmetric, "sym_eig: matrix is not square");
  require_finite(a.data(), "sym_eig");
  const auto m = detail::view(a);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::NotSymmetric, "sym_eig: asymmetry exceeds 1e-12 relative");
  }

  // Symmetrize exactly so the solver sees the lower triangle we validated.
  const detail::RowMajor sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::NonFinite, "sym_eig: eigensolver did not converge");
  }

  // Eigen returns ascending order.
  const auto n = static_cast<Eigen::Index>(a.rows());
  SymEigResult result;
  result.eigenvalues.resize(a.rows());
  result.eigenvectors = Matrix(a.rows(), a.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;
    result.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()(src);
    for (Eigen::Index r = 0; r < n; ++r) {
      result.eigenvectors(static_cast<std::size_t>(r), static_cast<std::size_t>(k)) =
          solver.eigenvectors()(r, src);
    }
  }
  return result;
}

Vector solve_spd(const Matrix& a, std::span<const double> b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw Error(Errc::DimMismatch, "solve_spd: shape mismatch");
  }
  Eigen::LLT<detail::RowMajor> llt(detail::view(a));
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::NotPositiveDefinite, "solve_spd: Cholesky factorization failed");
  }
  Eigen::VectorXd x = llt.solve(detail::view(b));
  // One step of iterative refinement tightens the residual on ill-conditioned
  // ridge systems with tiny alpha.
  const Eigen::VectorXd r = detail::view(b) - detail::view(a) * x;
  x += llt.solve(r);
  Vector out = detail::to_vector(x);
  require_finite(out, "solve_spd");
  return out;
}

Matrix orthonormal_basis(std::uint64_t seed, std::size_t dim, std::size_t k) {
  if (k > dim) {
    throw Error(Errc::KTooLarge, "orthonormal_basis: k=" + std::to_string(k) +
                                     " exceeds dim=" + std::to_string(dim));
  }
  Rng rng(seed);
  // Column-major scratch so each direction is contiguous.
  std::vector<Vector> cols(k, Vector(dim));
  for (auto& col : cols) {
    for (auto& v : col) v = rng.normal();
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double proj = dot(cols[i], cols[j]);
        for (std::size_t r = 0; r < dim; ++r) cols[j][r] -= proj * cols[i][r];
      }
    }
    const double len = norm(cols[j]);
    if (len < 1e-12) {
      throw Error(Errc::DegenerateData, "orthonormal_basis: degenerate Gaussian draw");
    }
    for (auto& v : cols[j]) v /= len;
  }
  Matrix out(dim, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < dim; ++r) out(r, j) = cols[j][r];
  }
  return out;
}

Vector rankdata(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::Empty, "rankdata: empty input");
  require_finite(x, "rankdata");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Vector ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
    i = j;
  }
  return ranks;
}

}  // namespace idioprobe
