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

#include "idioprobe/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "idioprobe/error.hpp"
#include "idioprobe/numerics.hpp"
#include "idioprobe/rng.hpp"

namespace idioprobe::stats {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch, std::string(who) + ": lengths " + std::to_string(a.size()) +
                                          " and " + std::to_string(b.size()));
  }
}

std::vector<double> differences(std::span<const double> a, std::span<const double> b,
                                const char* who) {
  require_same_length(a, b, who);
  if (a.size() < 2) throw Error(Errc::TooFewSamples, std::string(who) + ": need n >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Pearson on already-validated inputs; nullopt if either side has zero spread.
std::optional<double> pearson_impl(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::TooFewSamples, "mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::TooFewSamples, "sample_sd: need n >= 2");
  const double m = mean(x);
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "pearson");
  if (x.size() < 2) throw Error(Errc::TooFewSamples, "pearson: need n >= 2");
  const auto r = pearson_impl(x, y);
  if (!r) throw Error(Errc::ConstantInput, "pearson: constant input");
  return *r;
}

std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "spearman");
  if (x.size() < 3) throw Error(Errc::TooFewSamples, "spearman: need n >= 3");
  if (is_constant(x) || is_constant(y)) return std::nullopt;
  const Vector rx = rankdata(x);
  const Vector ry = rankdata(y);
  return pearson_impl(rx, ry);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rho = try_spearman(x, y);
  if (!rho) throw Error(Errc::ConstantInput, "spearman: constant input");
  return *rho;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "student_t: df must be positive");
  if (std::isnan(t)) throw Error(Errc::NonFinite, "student_t: t is NaN");
  if (std::isinf(t)) return 0.0;
  // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2). For large |t| the argument
  // df/(df+t^2) is computed directly so it keeps full relative precision.
  const double x = df / (df + t * t);
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(0.5 * df, 0.5, x);
}

double student_t_two_sided_log10_p(double t, double df) {
  const double p = student_t_two_sided_p(t, df);
  if (p > 1e-300) return std::log10(p);
  if (std::isinf(t)) return -std::numeric_limits<double>::infinity();
  // I_x(a, b) ~ x^a (1-x)^b / (a B(a, b)) for x -> 0, with x = df / (df + t^2).
  const double a = 0.5 * df;
  const double b = 0.5;
  const double log_x = std::log(df) - std::log(df + t * t);
  const double log_1mx = std::log(t * t) - std::log(df + t * t);
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double ln_p = a * log_x + b * log_1mx - std::log(a) - log_beta;
  return ln_p / std::log(10.0);
}

TTest paired_t(std::span<const double> a, std::span<const double> b) {
  const auto d = differences(a, b, "paired_t");
  const double sd = sample_sd(d);
  if (!(sd > 0.0)) throw Error(Errc::ZeroVariance, "paired_t: differences have zero variance");
  const double n = static_cast<double>(d.size());
  TTest out;
  out.t = mean(d) / (sd / std::sqrt(n));
  out.df = n - 1.0;
  out.p = student_t_two_sided_p(out.t, out.df);
  out.log10_p = student_t_two_sided_log10_p(out.t, out.df);
  return out;
}

TTest one_sample_t(std::span<const double> x, double mu) {
  std::vector<double> ref(x.size(), mu);
  return paired_t(x, ref);
}

double cohens_d_paired(std::span<const double> a, std::span<const double> b) {
  const auto d = differences(a, b, "cohens_d_paired");
  const double sd = sample_sd(d);
  if (!(sd > 0.0)) throw Error(Errc::ZeroVariance, "cohens_d_paired: zero variance");
  return mean(d) / sd;
}

BootstrapCI bootstrap_ci(std::span<const double> samples, BootstrapStat, std::size_t b,
                         double confidence, std::uint64_t seed) {
  if (samples.size() < 2) throw Error(Errc::TooFewSamples, "bootstrap_ci: need n >= 2");
  if (b < 100) throw Error(Errc::InvalidArgument, "bootstrap_ci: need b >= 100");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(Errc::InvalidArgument, "bootstrap_ci: confidence must be in (0, 1)");
  }
  require_finite(samples, "bootstrap_ci");
  const std::size_t n = samples.size();
  std::vector<double> stats(b);
  for (std::size_t i = 0; i < b; ++i) {
    Rng rng(derive_seed(seed, i));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += samples[rng.below(n)];
    stats[i] = sum / static_cast<double>(n);
  }
  std::sort(stats.begin(), stats.end());
  // Linear interpolation between order statistics.
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(b - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, b - 1);
    const double frac = pos - static_cast<double>(lo);
    return stats[lo] + frac * (stats[hi] - stats[lo]);
  };
  const double tail = 0.5 * (1.0 - confidence);
  BootstrapCI ci;
  ci.low = quantile(tail);
  ci.high = quantile(1.0 - tail);
  ci.b = b;
  ci.confidence = confidence;
  ci.seed = seed;
  return ci;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(Errc::DimMismatch, "cosine: length mismatch");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::ZeroVector, "cosine: zero vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

}  // namespace idioprobe::stats
