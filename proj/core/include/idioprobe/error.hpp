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

#include <stdexcept>
#include <string>
#include <string_view>

namespace idioprobe {

/// Every failure the engine reports carries one of these codes, so callers
/// (and tests) can branch on the kind of failure without parsing messages.
enum class Errc {
  // numerics
  NotSymmetric,
  NonFinite,
  NotPositiveDefinite,
  KTooLarge,
  Empty,
  DimMismatch,
  // dataio
  IoError,
  BadMagic,
  VersionUnsupported,
  TruncatedFile,
  TrailingData,
  IndexMismatch,
  DuplicateKey,
  SchemaError,
  ParseError,
  EmptyIntersection,
  FeatureUnknown,
  // pca
  DTooLarge,
  DegenerateData,
  // probes / evaluation
  TooFewRows,
  DegenerateValidation,
  TooFewSentences,
  FoldEmpty,
  SentenceNotInPlan,
  // stats
  ZeroVariance,
  ConstantInput,
  LengthMismatch,
  TooFewSamples,
  ZeroVector,
  // analyses
  MissingProbe,
  CorpusMissing,
  MissingLayerFile,
  // synth / cli
  ConfigInvalid,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace idioprobe
