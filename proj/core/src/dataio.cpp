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

#include "idioprobe/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "binary_io.hpp"
#include "idioprobe/error.hpp"
#include "idioprobe/rng.hpp"

namespace idioprobe {

namespace {

constexpr std::string_view kEmbMagic = "EMB1";
constexpr std::uint32_t kEmbVersion = 1;

const char* const kRequiredColumns[] = {"participant_id", "corpus_id", "sentence_id",
                                        "word_pos",       "word_text", "freq_log",
                                        "length",         "sent_position", "surprisal"};

std::string describe(const WordKey& k) {
  return "(" + k.corpus_id + ", " + std::to_string(k.sentence_id) + ", " +
         std::to_string(k.word_pos) + ")";
}

// RFC 4180 style: fields separated by commas, optionally double-quoted with
// "" as an escaped quote. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        // Embedded newline inside a quoted field.
        std::string next;
        if (!std::getline(in, next)) {
          throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                            ": unterminated quoted field");
        }
        ++line_no;
        field.push_back('\n');
        line = std::move(next);
        i = static_cast<std::size_t>(-1);
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& cell, const std::string& column, const std::string& origin,
               std::size_t line_no) {
  T value{};
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && *(end - 1) == ' ') --end;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw Error(Errc::ParseError, origin + ":" + std::to_string(line_no) + ": column '" +
                                      column + "': cannot parse '" + cell + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw Error(Errc::ParseError, origin + ":" + std::to_string(line_no) + ": column '" +
                                        column + "': non-finite value '" + cell + "'");
    }
  }
  return value;
}

}  // namespace

bool WordKeyLess::operator()(const WordKey& a, const WordKey& b) const noexcept {
  return std::tie(a.corpus_id, a.sentence_id, a.word_pos) <
         std::tie(b.corpus_id, b.sentence_id, b.word_pos);
}

std::size_t WordKeyIdHash::operator()(const WordKey& k) const noexcept {
  std::uint64_t h = hash_string(k.corpus_id);
  h = derive_seed(h, k.sentence_id);
  h = derive_seed(h, k.word_pos);
  return static_cast<std::size_t>(h);
}

bool WordKeyIdEqual::operator()(const WordKey& a, const WordKey& b) const noexcept {
  return a.sentence_id == b.sentence_id && a.word_pos == b.word_pos &&
         a.corpus_id == b.corpus_id;
}

// ---------------------------------------------------------------------------
// EmbeddingMatrix / EMB1

EmbeddingMatrix::EmbeddingMatrix(std::string model_id, std::uint32_t layer,
                                 std::vector<WordKey> index, Matrix values)
    : model_id_(std::move(model_id)),
      layer_(layer),
      index_(std::move(index)),
      values_(std::move(values)) {
  if (index_.size() != values_.rows()) {
    throw Error(Errc::IndexMismatch, "embedding index has " + std::to_string(index_.size()) +
                                         " keys but values have " +
                                         std::to_string(values_.rows()) + " rows");
  }
  if (values_.cols() == 0) throw Error(Errc::InvalidArgument, "embedding dim must be > 0");
  lookup_.reserve(index_.size());
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (!lookup_.emplace(index_[i], i).second) {
      throw Error(Errc::DuplicateKey, "duplicate word key " + describe(index_[i]));
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(const WordKey& key) const {
  const auto it = lookup_.find(key);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  auto in = detail::ByteReader::load(path);
  if (in.remaining() < kEmbMagic.size() || in.bytes(kEmbMagic.size()) != kEmbMagic) {
    throw Error(Errc::BadMagic, path.string() + ": not an EMB1 file");
  }
  const auto version = in.uint<std::uint32_t>();
  if (version != kEmbVersion) {
    throw Error(Errc::VersionUnsupported,
                path.string() + ": EMB1 version " + std::to_string(version));
  }
  const auto layer = in.uint<std::uint32_t>();
  const auto dim = in.uint<std::uint32_t>();
  const auto n_rows = in.uint<std::uint64_t>();
  std::string model_id = in.str16();
  if (dim == 0) throw Error(Errc::InvalidArgument, path.string() + ": dim is 0");

  const std::uint64_t n_values = n_rows * dim;
  if (n_rows != 0 && n_values / n_rows != dim) {
    throw Error(Errc::TruncatedFile, path.string() + ": row count overflows");
  }
  if (in.remaining() / 4 < n_values) {
    throw Error(Errc::TruncatedFile, path.string() + ": value block shorter than " +
                                         std::to_string(n_rows) + "x" + std::to_string(dim));
  }
  std::vector<double> values(n_values);
  for (auto& v : values) v = static_cast<double>(in.f32());

  std::vector<WordKey> index(n_rows);
  for (auto& key : index) {
    key.corpus_id = in.str16();
    key.sentence_id = in.uint<std::uint32_t>();
    key.word_pos = in.uint<std::uint32_t>();
    key.word_text = in.str16();
  }
  in.expect_end();
  return EmbeddingMatrix(std::move(model_id), layer, std::move(index),
                         Matrix(n_rows, dim, std::move(values)));
}

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  if (m.index().size() != m.values().rows()) {
    throw Error(Errc::IndexMismatch, "write_embeddings: index/rows mismatch");
  }
  detail::ByteWriter out;
  out.bytes(kEmbMagic);
  out.uint(kEmbVersion);
  out.uint(m.layer());
  out.uint(static_cast<std::uint32_t>(m.dim()));
  out.uint(static_cast<std::uint64_t>(m.size()));
  out.str16(m.model_id());
  for (const double v : m.values().data()) out.f32(static_cast<float>(v));
  for (const auto& key : m.index()) {
    out.str16(key.corpus_id);
    out.uint(key.sentence_id);
    out.uint(key.word_pos);
    out.str16(key.word_text);
  }
  out.save(path);
}

// ---------------------------------------------------------------------------
// TargetTable / CSV

TargetTable::TargetTable(std::string participant_id, std::string corpus_id,
                         std::vector<std::string> feature_names, std::vector<TargetRow> rows)
    : participant_id_(std::move(participant_id)),
      corpus_id_(std::move(corpus_id)),
      feature_names_(std::move(feature_names)),
      rows_(std::move(rows)) {
  lookup_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    const std::string where = participant_id_ + " " + describe(row.key);
    if (row.key.corpus_id != corpus_id_) {
      throw Error(Errc::SchemaError, where + ": corpus differs from table corpus '" +
                                         corpus_id_ + "'");
    }
    if (row.values.size() != feature_names_.size()) {
      throw Error(Errc::SchemaError, where + ": wrong number of feature values");
    }
    bool any_present = false;
    for (const auto& v : row.values) {
      if (v) {
        any_present = true;
        if (!std::isfinite(*v)) throw Error(Errc::NonFinite, where + ": non-finite target");
      }
    }
    if (any_present && !row.confounds) {
      throw Error(Errc::SchemaError, where + ": feature present but confounds missing");
    }
    if (row.confounds) {
      const auto& c = *row.confounds;
      if (!std::isfinite(c.freq_log) || !std::isfinite(c.length) ||
          !std::isfinite(c.surprisal) || !std::isfinite(c.sent_position)) {
        throw Error(Errc::NonFinite, where + ": non-finite confound");
      }
      if (c.sent_position < 0.0 || c.sent_position > 1.0) {
        throw Error(Errc::SchemaError, where + ": sent_position outside [0, 1]");
      }
    }
    if (!lookup_.emplace(row.key, i).second) {
      throw Error(Errc::DuplicateKey, "duplicate word key " + where);
    }
  }
}

std::optional<std::size_t> TargetTable::feature_index(const std::string& name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names_.begin());
}

const TargetRow* TargetTable::find(const WordKey& key) const {
  const auto it = lookup_.find(key);
  return it == lookup_.end() ? nullptr : &rows_[it->second];
}

std::vector<TargetTable> read_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  const std::string origin = path.string();

  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_csv_record(in, header, line_no)) {
    throw Error(Errc::SchemaError, origin + ": empty file, no header");
  }
  std::map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!column_of.emplace(header[i], i).second) {
      throw Error(Errc::SchemaError, origin + ": duplicate column '" + header[i] + "'");
    }
  }
  std::size_t required[std::size(kRequiredColumns)];
  for (std::size_t i = 0; i < std::size(kRequiredColumns); ++i) {
    const auto it = column_of.find(kRequiredColumns[i]);
    if (it == column_of.end()) {
      throw Error(Errc::SchemaError,
                  origin + ": missing required column '" + kRequiredColumns[i] + "'");
    }
    required[i] = it->second;
  }
  std::vector<std::string> features;
  std::vector<std::size_t> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const bool is_required =
        std::find(std::begin(kRequiredColumns), std::end(kRequiredColumns), header[i]) !=
        std::end(kRequiredColumns);
    if (!is_required) {
      features.push_back(header[i]);
      feature_cols.push_back(i);
    }
  }

  struct Pending {
    std::string corpus_id;
    std::vector<TargetRow> rows;
  };
  std::map<std::string, Pending> by_participant;
  std::vector<std::string> fields;
  while (read_csv_record(in, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      throw Error(Errc::ParseError, origin + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    }
    const auto& participant = fields[required[0]];
    TargetRow row;
    row.key.corpus_id = fields[required[1]];
    row.key.sentence_id =
        parse_number<std::uint32_t>(fields[required[2]], "sentence_id", origin, line_no);
    row.key.word_pos = parse_number<std::uint32_t>(fields[required[3]], "word_pos", origin, line_no);
    row.key.word_text = fields[required[4]];
    row.values.reserve(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
      const auto& cell = fields[feature_cols[f]];
      if (cell.empty()) {
        row.values.emplace_back(std::nullopt);
      } else {
        row.values.emplace_back(parse_number<double>(cell, features[f], origin, line_no));
      }
    }
    bool confounds_blank = true;
    for (std::size_t i = 5; i < 9; ++i) confounds_blank &= fields[required[i]].empty();
    if (!confounds_blank) {
      Confounds c;
      c.freq_log = parse_number<double>(fields[required[5]], "freq_log", origin, line_no);
      c.length = parse_number<double>(fields[required[6]], "length", origin, line_no);
      c.sent_position =
          parse_number<double>(fields[required[7]], "sent_position", origin, line_no);
      c.surprisal = parse_number<double>(fields[required[8]], "surprisal", origin, line_no);
      row.confounds = c;
    }

    auto& pending = by_participant[participant];
    if (pending.rows.empty()) {
      pending.corpus_id = row.key.corpus_id;
    } else if (pending.corpus_id != row.key.corpus_id) {
      throw Error(Errc::SchemaError, origin + ":" + std::to_string(line_no) + ": participant '" +
                                         participant + "' appears in corpora '" +
                                         pending.corpus_id + "' and '" + row.key.corpus_id +
                                         "'");
    }
    pending.rows.push_back(std::move(row));
  }

  std::vector<TargetTable> tables;
  tables.reserve(by_participant.size());
  for (auto& [participant, pending] : by_participant) {
    try {
      tables.emplace_back(participant, pending.corpus_id, features, std::move(pending.rows));
    } catch (const Error& e) {
      throw Error(e.code(), origin + ": " + e.what());
    }
  }
  return tables;
}

void write_targets(std::span<const TargetTable> tables, const std::filesystem::path& path) {
  if (tables.empty()) throw Error(Errc::InvalidArgument, "write_targets: no tables");
  const auto& features = tables.front().feature_names();
  for (const auto& t : tables) {
    if (t.feature_names() != features) {
      throw Error(Errc::InvalidArgument, "write_targets: tables disagree on feature columns");
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");

  for (std::size_t i = 0; i < std::size(kRequiredColumns); ++i) {
    out << (i ? "," : "") << kRequiredColumns[i];
  }
  for (const auto& f : features) out << ',' << csv_escape(f);
  out << '\n';
  for (const auto& t : tables) {
    for (const auto& row : t.rows()) {
      out << csv_escape(t.participant_id()) << ',' << csv_escape(row.key.corpus_id) << ','
          << row.key.sentence_id << ',' << row.key.word_pos << ','
          << csv_escape(row.key.word_text);
      if (row.confounds) {
        const auto& c = *row.confounds;
        out << ',' << format_double(c.freq_log) << ',' << format_double(c.length) << ','
            << format_double(c.sent_position) << ',' << format_double(c.surprisal);
      } else {
        out << ",,,,";
      }
      for (const auto& v : row.values) {
        out << ',';
        if (v) out << format_double(*v);
      }
      out << '\n';
    }
  }
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// align

AlignedDataset align(const EmbeddingMatrix& emb, const TargetTable& targets,
                     const std::string& feature) {
  const auto f = targets.feature_index(feature);
  if (!f) {
    throw Error(Errc::FeatureUnknown, "feature '" + feature + "' not in targets of participant '" +
                                          targets.participant_id() + "'");
  }
  std::vector<std::size_t> rows;
  Vector y;
  std::size_t corpus_rows = 0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto& key = emb.index()[i];
    if (key.corpus_id != targets.corpus_id()) continue;
    ++corpus_rows;
    const TargetRow* row = targets.find(key);
    if (row == nullptr || !row->values[*f]) continue;
    rows.push_back(i);
    y.push_back(*row->values[*f]);
  }
  if (rows.empty()) {
    throw Error(Errc::EmptyIntersection, "participant '" + targets.participant_id() +
                                             "' has no embedded words with feature '" + feature +
                                             "'");
  }
  AlignedDataset out;
  out.x = emb.values().select_rows(rows);
  out.y = std::move(y);
  out.keys.reserve(rows.size());
  for (const auto r : rows) out.keys.push_back(emb.index()[r]);
  out.participant_id = targets.participant_id();
  out.corpus_id = targets.corpus_id();
  out.feature_name = feature;
  out.coverage = static_cast<double>(rows.size()) / static_cast<double>(corpus_rows);
  return out;
}

}  // namespace idioprobe
