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

#include <cstdint>
#include <optional>
#include <span>

namespace idioprobe::stats {

/// Pearson correlation of average ranks.
/// Throws LengthMismatch, TooFewSamples (n < 3) or ConstantInput.
double spearman(std::span<const double> x, std::span<const double> y);

/// Like spearman, but returns nullopt when either side is constant.
std::optional<double> try_spearman(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> x);

struct TTest {
  double t = 0.0;
  double p = 1.0;  // two-sided
  double df = 0.0;
  double log10_p = 0.0;  // stays finite when p underflows
};

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of
/// freedom, through the regularized incomplete beta function.
double student_t_two_sided_p(double t, double df);

/// log10 of the same tail probability. Below 1e-300 the leading term of the
/// incomplete-beta expansion is evaluated in log space, so extreme statistics
/// never collapse to -inf.
double student_t_two_sided_log10_p(double t, double df);

/// Paired t-test on a - b. Throws LengthMismatch, TooFewSamples (n < 2) or
/// ZeroVariance.
TTest paired_t(std::span<const double> a, std::span<const double> b);

/// One-sample t-test of mean(x) against mu.
TTest one_sample_t(std::span<const double> x, double mu = 0.0);

/// mean(a - b) / sd(a - b). Same errors as paired_t.
double cohens_d_paired(std::span<const double> a, std::span<const double> b);

enum class BootstrapStat { Mean };

struct BootstrapCI {
  double low = 0.0;
  double high = 0.0;
  std::size_t b = 0;
  double confidence = 0.95;
  std::uint64_t seed = 0;
};

/// Percentile bootstrap of the sample mean. Resample i draws from its own
/// stream derived from (seed, i), so the interval is fixed by the seed.
/// Throws TooFewSamples (n < 2), InvalidArgument (b < 100 or confidence
/// outside (0, 1)).
BootstrapCI bootstrap_ci(std::span<const double> samples, BootstrapStat stat, std::size_t b,
                         double confidence, std::uint64_t seed);

/// u.v / (|u||v|). Throws ZeroVector or DimMismatch.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace idioprobe::stats
