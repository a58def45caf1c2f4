// Copyright 2026 The Irony Authors.
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

// Single-file tensor container shared by encoder packages and classifier
// checkpoints.
//
// Layout:
//   bytes [0, 8)        manifest length N, unsigned 64-bit little-endian
//   bytes [8, 8 + N)    manifest, JSON text
//   bytes [8 + N, end)  blob of little-endian IEEE-754 binary32 values
//
// The manifest is an object {"meta": {...}, "tensors": [...]} where each
// tensor entry is {"name", "shape", "dtype": "f32", "offset", "length"};
// offset and length are in bytes relative to the blob start and tensors are
// stored row-major in the order they were added.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irony/error.hpp"

namespace irony {

struct PackedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;

  std::size_t element_count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }
};

struct TensorPackage {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<PackedTensor> tensors;

  void add(std::string name, std::vector<std::size_t> shape, std::vector<float> values) {
    tensors.push_back({std::move(name), std::move(shape), std::move(values)});
  }

  const PackedTensor& get(const std::string& name) const {
    for (const auto& t : tensors) {
      if (t.name == name) return t;
    }
    throw ValidationError("tensor package: missing tensor '" + name + "'");
  }
};

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void put_f32_le(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

inline float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

inline std::string serialize_package(const TensorPackage& pkg) {
  nlohmann::json manifest;
  manifest["meta"] = pkg.meta;
  manifest["tensors"] = nlohmann::json::array();
  std::string blob;
  for (const auto& t : pkg.tensors) {
    if (t.values.size() != t.element_count()) {
      throw ValidationError("tensor package: tensor '" + t.name +
                            "' has " + std::to_string(t.values.size()) +
                            " values but shape implies " +
                            std::to_string(t.element_count()));
    }
    const std::size_t offset = blob.size();
    for (float v : t.values) detail::put_f32_le(blob, v);
    manifest["tensors"].push_back({{"name", t.name},
                                   {"shape", t.shape},
                                   {"dtype", "f32"},
                                   {"offset", offset},
                                   {"length", blob.size() - offset}});
  }
  const std::string text = manifest.dump();
  std::string out;
  out.reserve(8 + text.size() + blob.size());
  detail::put_u64_le(out, text.size());
  out += text;
  out += blob;
  return out;
}

inline TensorPackage parse_package(const std::string& bytes, const std::string& origin = "package") {
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8) {
    throw ValidationError(origin + ": corrupt payload: file shorter than the length prefix");
  }
  const std::uint64_t manifest_len = detail::get_u64_le(raw);
  if (manifest_len > bytes.size() - 8) {
    throw ValidationError(origin + ": corrupt payload: manifest length exceeds file size");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": corrupt manifest: " + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("tensors") || !manifest["tensors"].is_array()) {
    throw ValidationError(origin + ": corrupt manifest: no tensor list");
  }

  TensorPackage pkg;
  pkg.meta = manifest.value("meta", nlohmann::json::object());
  const unsigned char* blob = raw + 8 + manifest_len;
  const std::size_t blob_size = bytes.size() - 8 - manifest_len;

  for (const auto& entry : manifest["tensors"]) {
    PackedTensor t;
    std::size_t offset = 0;
    std::size_t length = 0;
    try {
      t.name = entry.at("name").get<std::string>();
      t.shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (entry.at("dtype").get<std::string>() != "f32") {
        throw ValidationError(origin + ": tensor '" + t.name + "' has unsupported dtype");
      }
      offset = entry.at("offset").get<std::size_t>();
      length = entry.at("length").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(origin + ": corrupt manifest entry: " + e.what());
    }
    if (length != t.element_count() * 4) {
      throw ValidationError(origin + ": shape mismatch for tensor '" + t.name +
                            "': byte length " + std::to_string(length) +
                            " does not match shape");
    }
    if (offset > blob_size || length > blob_size - offset) {
      throw ValidationError(origin + ": corrupt payload: tensor '" + t.name +
                            "' extends past end of file");
    }
    t.values.resize(t.element_count());
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      t.values[i] = detail::get_f32_le(blob + offset + 4 * i);
      if (!std::isfinite(t.values[i])) {
        throw ValidationError(origin + ": tensor '" + t.name + "' contains non-finite values");
      }
    }
    pkg.tensors.push_back(std::move(t));
  }
  return pkg;
}

inline void write_package(const TensorPackage& pkg, const std::string& path) {
  const std::string bytes = serialize_package(pkg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline TensorPackage read_package(const std::string& path) {
  return parse_package(read_file_bytes(path), path);
}

// FNV-1a, used to key embedding caches to the exact encoder package bytes.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Shape helpers used by the model serializers.
inline std::vector<float> to_f32(std::span<const double> values) {
  return std::vector<float>(values.begin(), values.end());
}

inline void expect_shape(const PackedTensor& t, const std::vector<std::size_t>& shape,
                         const std::string& origin) {
  if (t.shape != shape) {
    auto fmt = [](const std::vector<std::size_t>& s) {
      std::string r = "[";
      for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + std::to_string(s[i]);
      return r + "]";
    };
    throw ValidationError(origin + ": shape mismatch for tensor '" + t.name + "': expected " +
                          fmt(shape) + ", found " + fmt(t.shape));
  }
}

}  // namespace irony
