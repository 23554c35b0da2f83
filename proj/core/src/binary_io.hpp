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

// Little-endian byte encoding shared by the EMB1 and PCA1 formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "idioprobe/error.hpp"

namespace idioprobe::detail {

class ByteWriter {
 public:
  void bytes(std::string_view raw) { buf_.append(raw); }

  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xffU));
    }
  }

  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

  /// u16 length prefix + UTF-8 bytes.
  void str16(std::string_view s) {
    if (s.size() > 0xffff) throw Error(Errc::InvalidArgument, "string longer than 65535 bytes");
    uint(static_cast<std::uint16_t>(s.size()));
    bytes(s);
  }

  const std::string& buffer() const noexcept { return buf_; }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
  }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string data, std::string origin)
      : data_(std::move(data)), origin_(std::move(origin)) {}

  static ByteReader load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ByteReader(std::move(data), path.string());
  }

  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view out(data_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T uint() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

  std::string str16() {
    const auto len = uint<std::uint16_t>();
    return std::string(bytes(len));
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t offset() const noexcept { return pos_; }
  const std::string& origin() const noexcept { return origin_; }

  void expect_end() const {
    if (remaining() != 0) {
      throw Error(Errc::TrailingData, origin_ + ": " + std::to_string(remaining()) +
                                          " unexpected bytes after offset " +
                                          std::to_string(pos_));
    }
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(Errc::TruncatedFile, origin_ + ": need " + std::to_string(n) +
                                           " bytes at offset " + std::to_string(pos_) +
                                           ", file has " + std::to_string(data_.size()));
    }
  }

  std::string data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace idioprobe::detail
