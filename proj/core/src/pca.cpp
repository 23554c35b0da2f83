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

#include "idioprobe/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.hpp"
#include "eigen_bridge.hpp"
#include "idioprobe/error.hpp"

namespace idioprobe {

namespace {
constexpr std::string_view kPcaMagic = "PCA1";
constexpr std::uint32_t kPcaVersion = 1;
}  // namespace

double PcaModel::retained_variance() const {
  return std::accumulate(explained_variance_ratio.begin(), explained_variance_ratio.end(), 0.0);
}

PcaModel fit_pca(const Matrix& data, std::size_t d) {
  const std::size_t n = data.rows();
  const std::size_t dim = data.cols();
  if (n < 2) throw Error(Errc::TooFewRows, "fit_pca: need at least two rows");
  if (d == 0 || d > std::min(n - 1, dim)) {
    throw Error(Errc::DTooLarge, "fit_pca: d=" + std::to_string(d) + " outside [1, " +
                                     std::to_string(std::min(n - 1, dim)) + "]");
  }
  const auto x = detail::view(data);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const detail::RowMajor centered = x.rowwise() - mean;
  Matrix cov(dim, dim);
  detail::view(cov).noalias() =
      (centered.transpose() * centered) / static_cast<double>(n - 1);
  // Exact symmetry for the eigensolver's precondition.
  detail::view(cov) = 0.5 * (detail::view(cov) + detail::view(cov).transpose()).eval();

  double trace = 0.0;
  for (std::size_t i = 0; i < dim; ++i) trace += cov(i, i);
  if (!(trace > 0.0)) throw Error(Errc::DegenerateData, "fit_pca: zero total variance");

  const SymEigResult eig = sym_eig(cov);

  PcaModel model;
  model.mean = detail::to_vector(mean.transpose());
  model.components = Matrix(dim, d);
  model.explained_variance.resize(d);
  model.explained_variance_ratio.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < dim; ++r) {
      if (std::abs(eig.eigenvectors(r, k)) > std::abs(eig.eigenvectors(argmax, k))) argmax = r;
    }
    const double sign = eig.eigenvectors(argmax, k) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < dim; ++r) model.components(r, k) = sign * eig.eigenvectors(r, k);
    const double lambda = std::max(eig.eigenvalues[k], 0.0);
    model.explained_variance[k] = lambda;
    model.explained_variance_ratio[k] = std::clamp(lambda / trace, 0.0, 1.0);
  }
  return model;
}

Matrix project(const PcaModel& model, const Matrix& rows) {
  if (rows.cols() != model.input_dim()) {
    throw Error(Errc::DimMismatch, "project: rows have " + std::to_string(rows.cols()) +
                                       " columns, model expects " +
                                       std::to_string(model.input_dim()));
  }
  const Eigen::RowVectorXd mean = detail::view(std::span<const double>(model.mean)).transpose();
  Matrix out(rows.rows(), model.output_dim());
  detail::view(out).noalias() =
      (detail::view(rows).rowwise() - mean) * detail::view(model.components);
  return out;
}

EmbeddingMatrix project(const PcaModel& model, const EmbeddingMatrix& emb) {
  return EmbeddingMatrix(emb.model_id(), emb.layer(), emb.index(), project(model, emb.values()));
}

void write_pca(const PcaModel& model, const std::filesystem::path& path) {
  detail::ByteWriter out;
  out.bytes(kPcaMagic);
  out.uint(kPcaVersion);
  out.uint(static_cast<std::uint32_t>(model.input_dim()));
  out.uint(static_cast<std::uint32_t>(model.output_dim()));
  for (const double v : model.mean) out.f64(v);
  for (const double v : model.components.data()) out.f64(v);
  for (const double v : model.explained_variance) out.f64(v);
  for (const double v : model.explained_variance_ratio) out.f64(v);
  out.save(path);
}

PcaModel read_pca(const std::filesystem::path& path) {
  auto in = detail::ByteReader::load(path);
  if (in.remaining() < kPcaMagic.size() || in.bytes(kPcaMagic.size()) != kPcaMagic) {
    throw Error(Errc::BadMagic, path.string() + ": not a PCA1 file");
  }
  const auto version = in.uint<std::uint32_t>();
  if (version != kPcaVersion) {
    throw Error(Errc::VersionUnsupported, path.string() + ": PCA1 version " +
                                              std::to_string(version));
  }
  const auto dim = in.uint<std::uint32_t>();
  const auto d = in.uint<std::uint32_t>();
  const std::uint64_t expected = (static_cast<std::uint64_t>(dim) * (d + 1) + 2ULL * d) * 8;
  if (in.remaining() < expected) {
    throw Error(Errc::TruncatedFile, path.string() + ": PCA1 payload too short");
  }
  PcaModel model;
  model.mean.resize(dim);
  for (auto& v : model.mean) v = in.f64();
  std::vector<double> comps(static_cast<std::size_t>(dim) * d);
  for (auto& v : comps) v = in.f64();
  model.components = Matrix(dim, d, std::move(comps));
  model.explained_variance.resize(d);
  for (auto& v : model.explained_variance) v = in.f64();
  model.explained_variance_ratio.resize(d);
  for (auto& v : model.explained_variance_ratio) v = in.f64();
  in.expect_end();
  return model;
}

}  // namespace idioprobe
