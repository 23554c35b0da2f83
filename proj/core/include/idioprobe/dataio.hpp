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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "idioprobe/numerics.hpp"

namespace idioprobe {

/// One word occurrence. Identity is (corpus_id, sentence_id, word_pos);
/// word_text rides along for reports and is not part of the identity.
struct WordKey {
  std::string corpus_id;
  std::uint32_t sentence_id = 0;
  std::uint32_t word_pos = 0;
  std::string word_text;

  friend bool operator==(const WordKey&, const WordKey&) = default;
};

/// Orders and compares on identity only.
struct WordKeyLess {
  bool operator()(const WordKey& a, const WordKey& b) const noexcept;
};
struct WordKeyIdHash {
  std::size_t operator()(const WordKey& k) const noexcept;
};
struct WordKeyIdEqual {
  bool operator()(const WordKey& a, const WordKey& b) const noexcept;
};

template <typename T>
using WordKeyMap = std::unordered_map<WordKey, T, WordKeyIdHash, WordKeyIdEqual>;

/// Sentence identity used by fold plans; sentence ids are only unique within
/// a corpus.
struct SentenceKey {
  std::string corpus_id;
  std::uint32_t sentence_id = 0;

  friend auto operator<=>(const SentenceKey&, const SentenceKey&) = default;
};

inline SentenceKey sentence_of(const WordKey& k) { return {k.corpus_id, k.sentence_id}; }

/// Word-occurrence vectors for one (model, layer).
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws IndexMismatch if index.size() != values.rows(), DuplicateKey on a
  /// repeated identity, InvalidArgument if values has zero columns.
  EmbeddingMatrix(std::string model_id, std::uint32_t layer, std::vector<WordKey> index,
                  Matrix values);

  const std::string& model_id() const noexcept { return model_id_; }
  std::uint32_t layer() const noexcept { return layer_; }
  std::size_t dim() const noexcept { return values_.cols(); }
  std::size_t size() const noexcept { return index_.size(); }
  const std::vector<WordKey>& index() const noexcept { return index_; }
  const Matrix& values() const noexcept { return values_; }

  /// Row of a key, by identity.
  std::optional<std::size_t> find(const WordKey& key) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.model_id_ == b.model_id_ && a.layer_ == b.layer_ && a.index_ == b.index_ &&
           a.values_ == b.values_;
  }

 private:
  std::string model_id_;
  std::uint32_t layer_ = 0;
  std::vector<WordKey> index_;
  Matrix values_;
  WordKeyMap<std::size_t> lookup_;
};

/// Reads an EMB1 file. Values are stored as float32 and promoted to double.
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
/// Writes an EMB1 file (little-endian). Values are narrowed to float32.
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

struct Confounds {
  double freq_log = 0.0;
  double length = 0.0;
  double sent_position = 0.0;
  double surprisal = 0.0;

  friend bool operator==(const Confounds&, const Confounds&) = default;
};

inline constexpr std::size_t kConfoundCount = 4;
inline constexpr const char* kConfoundNames[kConfoundCount] = {"freq_log", "length",
                                                               "sent_position", "surprisal"};

struct TargetRow {
  WordKey key;
  std::vector<std::optional<double>> values;  // one per feature; nullopt = MISSING
  std::optional<Confounds> confounds;

  friend bool operator==(const TargetRow&, const TargetRow&) = default;
};

/// Word-level targets of one participant in one corpus.
class TargetTable {
 public:
  TargetTable() = default;
  /// Validates the row invariants: unique keys, every key in `corpus_id`, one
  /// value slot per feature, finite values, confounds present on any row with
  /// a present value, sent_position in [0, 1].
  TargetTable(std::string participant_id, std::string corpus_id,
              std::vector<std::string> feature_names, std::vector<TargetRow> rows);

  const std::string& participant_id() const noexcept { return participant_id_; }
  const std::string& corpus_id() const noexcept { return corpus_id_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<TargetRow>& rows() const noexcept { return rows_; }

  std::optional<std::size_t> feature_index(const std::string& name) const;
  const TargetRow* find(const WordKey& key) const;

  friend bool operator==(const TargetTable& a, const TargetTable& b) {
    return a.participant_id_ == b.participant_id_ && a.corpus_id_ == b.corpus_id_ &&
           a.feature_names_ == b.feature_names_ && a.rows_ == b.rows_;
  }

 private:
  std::string participant_id_;
  std::string corpus_id_;
  std::vector<std::string> feature_names_;
  std::vector<TargetRow> rows_;
  WordKeyMap<std::size_t> lookup_;
};

/// Reads a targets CSV holding one or more participants. Returns one table per
/// participant, ordered by participant_id. A participant spanning two corpora
/// is a SchemaError.
std::vector<TargetTable> read_targets(const std::filesystem::path& path);
/// Writes tables (which must share feature names) as a single targets CSV.
void write_targets(std::span<const TargetTable> tables, const std::filesystem::path& path);

/// Probe-ready rows for one participant and feature.
struct AlignedDataset {
  Matrix x;
  Vector y;
  std::vector<WordKey> keys;
  std::string participant_id;
  std::string corpus_id;
  std::string feature_name;
  double coverage = 0.0;  // matched rows / embedding rows

  std::size_t size() const noexcept { return y.size(); }
};

/// Intersects embedding rows with the table's non-missing rows for `feature`,
/// keeping embedding row order. Throws FeatureUnknown or EmptyIntersection.
AlignedDataset align(const EmbeddingMatrix& emb, const TargetTable& targets,
                     const std::string& feature);

}  // namespace idioprobe
