/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "basnet/data.h"

namespace basnet {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'N', 'F'};
constexpr std::size_t kHeaderBytes = 16;
// Largest payload accepted, in values (8 GiB of float32).
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 31;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void WriteFeatureFile(const std::filesystem::path& path,
                      const Tensor& features) {
  Require(features.rank() == 2 && features.rows() >= 1 && features.cols() >= 1,
          ErrorKind::kShape,
          "feature matrix must be L x D with L, D >= 1, got " +
              ShapeString(features.shape()));
  std::string bytes(kMagic, 4);
  PutU32(bytes, kFeatureFileVersion);
  PutU32(bytes, static_cast<std::uint32_t>(features.rows()));
  PutU32(bytes, static_cast<std::uint32_t>(features.cols()));
  for (float v : features.values()) {
    PutU32(bytes, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require(out.good(), ErrorKind::kIo, "write failed for " + path.string());
}

Tensor ParseFeatureBytes(std::span<const char> bytes) {
  Require(bytes.size() >= kHeaderBytes, ErrorKind::kTruncated,
          "feature file header is truncated (" + std::to_string(bytes.size()) +
              " bytes)");
  Require(std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorKind::kBadMagic,
          "feature file does not start with BSNF");
  const std::uint32_t version = GetU32(bytes.data() + 4);
  Require(version == kFeatureFileVersion, ErrorKind::kVersion,
          "unsupported feature file version " + std::to_string(version));
  const std::uint32_t num_rows = GetU32(bytes.data() + 8);
  const std::uint32_t dim = GetU32(bytes.data() + 12);
  Require(num_rows >= 1 && dim >= 1, ErrorKind::kShape,
          "feature file declares L=" + std::to_string(num_rows) +
              ", D=" + std::to_string(dim) + "; both must be >= 1");
  const std::uint64_t count = std::uint64_t{num_rows} * dim;
  Require(count <= kMaxValues, ErrorKind::kDimensionOverflow,
          "feature file declares " + std::to_string(count) + " values");
  const std::uint64_t expected = kHeaderBytes + 4 * count;
  Require(bytes.size() >= expected, ErrorKind::kTruncated,
          "feature payload is truncated: " + std::to_string(bytes.size()) +
              " of " + std::to_string(expected) + " bytes");
  Require(bytes.size() == expected, ErrorKind::kDimensionOverflow,
          "feature file has " + std::to_string(bytes.size() - expected) +
              " trailing bytes");
  std::vector<float> values(count);
  const char* p = bytes.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) {
    values[i] = std::bit_cast<float>(GetU32(p));
  }
  return Tensor::Matrix(num_rows, dim, std::move(values));
}

Tensor ReadFeatureFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  try {
    return ParseFeatureBytes(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace basnet
