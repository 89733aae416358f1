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
#include "basnet/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace basnet {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'N', 'C'};

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::span<const char> bytes) : bytes_(bytes) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }
  const char* Take(std::size_t n, const char* what) {
    Require(bytes_.size() - pos_ >= n, ErrorKind::kTruncated,
            std::string("checkpoint truncated while reading ") + what +
                " at byte " + std::to_string(pos_));
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint64_t UInt(int width, const char* what) {
    const char* p = Take(width, what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return v;
  }
  std::uint32_t U32(const char* what) {
    return static_cast<std::uint32_t>(UInt(4, what));
  }
  std::uint64_t U64(const char* what) { return UInt(8, what); }
  float F32(const char* what) { return std::bit_cast<float>(U32(what)); }
  double F64(const char* what) { return std::bit_cast<double>(U64(what)); }

 private:
  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kMaxNameLength = 256;
constexpr std::uint32_t kMaxRank = 3;

}  // namespace

std::string EncodeCheckpoint(const BasNet<float>& model,
                             const CheckpointMeta& meta) {
  Writer w;
  w.Bytes(kMagic, 4);
  w.U32(kCheckpointVersion);
  const ModelConfig& c = meta.model;
  w.U32(c.num_classes);
  w.U32(c.feature_dim);
  w.U32(c.num_segments);
  w.U32(c.hidden_dim);
  w.U32(c.cas_kernel);
  w.U32(c.filter_hidden);
  w.U64(c.seed);
  w.U32(static_cast<std::uint32_t>(meta.mode));
  w.F64(meta.r);
  const auto& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& name = params.name(i);
    const auto& value = params.value(i);
    w.U32(static_cast<std::uint32_t>(name.size()));
    w.Bytes(name.data(), name.size());
    w.U32(static_cast<std::uint32_t>(value.rank()));
    for (std::size_t d : value.shape()) w.U32(static_cast<std::uint32_t>(d));
    for (float v : value.values()) w.F32(v);
  }
  return w.Take();
}

Checkpoint DecodeCheckpoint(std::span<const char> bytes) {
  Reader r(bytes);
  Require(std::memcmp(r.Take(4, "magic"), kMagic, 4) == 0, ErrorKind::kBadMagic,
          "not a checkpoint (missing BSNC magic)");
  const std::uint32_t version = r.U32("version");
  Require(version == kCheckpointVersion, ErrorKind::kVersion,
          "unsupported checkpoint version " + std::to_string(version));
  CheckpointMeta meta;
  meta.model.num_classes = static_cast<int>(r.U32("num_classes"));
  meta.model.feature_dim = static_cast<int>(r.U32("feature_dim"));
  meta.model.num_segments = static_cast<int>(r.U32("num_segments"));
  meta.model.hidden_dim = static_cast<int>(r.U32("hidden_dim"));
  meta.model.cas_kernel = static_cast<int>(r.U32("cas_kernel"));
  meta.model.filter_hidden = static_cast<int>(r.U32("filter_hidden"));
  meta.model.seed = r.U64("seed");
  const std::uint32_t mode = r.U32("mode");
  Require(mode <= static_cast<std::uint32_t>(TrainMode::kFull),
          ErrorKind::kParse, "checkpoint has unknown mode " + std::to_string(mode));
  meta.mode = static_cast<TrainMode>(mode);
  meta.r = r.F64("r");

  ParameterSet<float> params;
  while (!r.AtEnd()) {
    const std::uint32_t name_len = r.U32("name length");
    Require(name_len <= kMaxNameLength, ErrorKind::kDimensionOverflow,
            "checkpoint parameter name too long");
    std::string name(r.Take(name_len, "name"), name_len);
    const std::uint32_t rank = r.U32("rank");
    Require(rank >= 1 && rank <= kMaxRank, ErrorKind::kDimensionOverflow,
            "parameter " + name + " has rank " + std::to_string(rank));
    Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& d : shape) {
      d = r.U32("dims");
      count *= d;
      Require(count <= (std::uint64_t{1} << 31), ErrorKind::kDimensionOverflow,
              "parameter " + name + " is too large");
    }
    std::vector<float> values(count);
    for (auto& v : values) v = r.F32("values");
    params.Add(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return {meta, BasNet<float>(meta.model, std::move(params))};
}

void SaveCheckpoint(const BasNet<float>& model, const CheckpointMeta& meta,
                    const std::filesystem::path& path) {
  const std::string bytes = EncodeCheckpoint(model, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require(out.good(), ErrorKind::kIo, "write failed for " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorKind::kIo, "cannot open checkpoint " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  try {
    return DecodeCheckpoint(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void RequireCompatible(const CheckpointMeta& meta, const Dataset& dataset) {
  Require(meta.model.num_classes == dataset.num_classes(), ErrorKind::kMismatch,
          "checkpoint was trained for " + std::to_string(meta.model.num_classes) +
              " classes, dataset has " + std::to_string(dataset.num_classes()));
  if (!dataset.records.empty()) {
    const auto dim = static_cast<int>(dataset.records.front().feature_dim());
    Require(meta.model.feature_dim == dim, ErrorKind::kMismatch,
            "checkpoint expects " + std::to_string(meta.model.feature_dim) +
                "-dim features, dataset has " + std::to_string(dim));
  }
}

}  // namespace basnet
