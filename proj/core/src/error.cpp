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

#include "idioprobe/error.hpp"

namespace idioprobe {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::Empty: return "Empty";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::IoError: return "IoError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::TrailingData: return "TrailingData";
    case Errc::IndexMismatch: return "IndexMismatch";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyIntersection: return "EmptyIntersection";
    case Errc::FeatureUnknown: return "FeatureUnknown";
    case Errc::DTooLarge: return "DTooLarge";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::DegenerateValidation: return "DegenerateValidation";
    case Errc::TooFewSentences: return "TooFewSentences";
    case Errc::FoldEmpty: return "FoldEmpty";
    case Errc::SentenceNotInPlan: return "SentenceNotInPlan";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ConstantInput: return "ConstantInput";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::MissingProbe: return "MissingProbe";
    case Errc::CorpusMissing: return "CorpusMissing";
    case Errc::MissingLayerFile: return "MissingLayerFile";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace idioprobe
