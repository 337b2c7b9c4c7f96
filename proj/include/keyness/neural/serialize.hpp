// Copyright 2026 The Keyness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "keyness/error.hpp"
#include "keyness/neural/autograd.hpp"
#include "keyness/text.hpp"

namespace keyness::nn {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; add byte swapping for this target");

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Model file layout (all integers and floats little-endian):
//   magic[8] | u32 format_version | u32 feature_order_version |
//   u64 n | n bytes of JSON header | u64 tensor_count |
//   per tensor: u64 name_len | name | u64 rows | u64 cols | rows*cols f64 |
//   u64 FNV-1a checksum of every preceding byte
class ModelWriter {
 public:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void str(std::string_view s) {
    u64(s.size());
    raw(s.data(), s.size());
  }

  void header(std::string_view magic, std::uint32_t feature_order, const nlohmann::json& meta) {
    raw(magic.data(), 8);
    u32(kModelFormatVersion);
    u32(feature_order);
    str(meta.dump());
  }

  void tensors(const ParameterStore& ps) {
    u64(ps.size());
    for (const auto& p : ps) {
      str(p.name);
      u64(static_cast<std::uint64_t>(p.value.rows()));
      u64(static_cast<std::uint64_t>(p.value.cols()));
      raw(p.value.data(), sizeof(double) * static_cast<std::size_t>(p.value.size()));
    }
  }

  void save(const std::filesystem::path& path) {
    const std::uint64_t sum = text::fnv1a(buf_);
    u64(sum);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model '" + path.string() + "'");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw DataError("failed writing model '" + path.string() + "'");
  }

 private:
  std::string buf_;
};

class ModelReader {
 public:
  ModelReader(const std::filesystem::path& path, std::string_view magic) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model '" + path_ + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    buf_ = ss.str();
    if (buf_.size() < 8 + 4 + 4 + 8) fail("file truncated");
    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - 8, 8);
    if (text::fnv1a(std::string_view(buf_).substr(0, buf_.size() - 8)) != stored) {
      fail("checksum mismatch (truncated or corrupted file)");
    }
    end_ = buf_.size() - 8;
    if (std::string_view(buf_).substr(0, 8) != magic) fail("wrong file type");
    pos_ = 8;
    const auto version = u32();
    if (version != kModelFormatVersion) {
      throw FormatError(path_ + ": format_version " + std::to_string(version) +
                        " not supported (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    feature_order_ = u32();
    try {
      meta_ = nlohmann::json::parse(str());
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("bad header: ") + e.what());
    }
  }

  std::uint32_t feature_order_version() const { return feature_order_; }
  const nlohmann::json& meta() const { return meta_; }

  // Fills `ps`, which must already hold tensors of the declared names and shapes.
  void tensors(ParameterStore& ps) {
    const auto n = u64();
    if (n != ps.size()) fail("tensor count does not match architecture");
    for (auto& p : ps) {
      const auto name = str();
      const auto rows = u64(), cols = u64();
      if (name != p.name || rows != static_cast<std::uint64_t>(p.value.rows()) ||
          cols != static_cast<std::uint64_t>(p.value.cols())) {
        fail("tensor '" + name + "' does not match architecture (expected '" + p.name + "')");
      }
      need(rows * cols * sizeof(double));
      std::memcpy(p.value.data(), buf_.data() + pos_, rows * cols * sizeof(double));
      pos_ += rows * cols * sizeof(double);
    }
    if (pos_ != end_) fail("trailing bytes after payload");
  }

  [[noreturn]] void fail(const std::string& why) const { throw FormatError(path_ + ": " + why); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) fail("file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, buf_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::uint32_t feature_order_ = 0;
  nlohmann::json meta_;
};

}  // namespace keyness::nn
