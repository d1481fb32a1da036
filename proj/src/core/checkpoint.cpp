// Copyright 2026 The channelsum Authors.
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

// Checkpoint layout:
//
//   channelsum-checkpoint <version>
//   config <json>
//   vocab_size <n>
//   vocab_digest <hex>
//   epochs_done <n>
//   adam_step <n>
//   blobs <count>
//   blob <name> <d0>x<d1>... <offset> <bytes> <crc32 hex>    (count lines)
//   end
//   <payload>
//
// Offsets are relative to the first payload byte. Every blob is a row-major
// little-endian float32 array. Blob names are "param/<p>", "adam_m/<p>" and
// "adam_v/<p>" for each model parameter p.

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "channelsum/error.hpp"
#include "channelsum/trainer.hpp"

namespace channelsum {
namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kMagic = "channelsum-checkpoint";

struct BlobEntry {
  ad::Shape shape;
  std::uint64_t offset = 0;
  std::uint64_t bytes = 0;
  std::uint32_t crc = 0;
};

std::uint32_t Crc32(const std::string& data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

template <typename Range>
std::string EncodeFloats(const Range& values) {
  std::string out(values.size() * 4, '\0');
  std::size_t i = 0;
  for (const auto v : values) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    ++i;
  }
  return out;
}

std::vector<float> DecodeFloats(std::string_view bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    }
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::string ShapeField(const ad::Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s.empty() ? "scalar" : s;
}

ad::Shape ParseShape(const std::string& field) {
  ad::Shape shape;
  if (field == "scalar") return shape;
  std::stringstream ss(field);
  std::string part;
  while (std::getline(ss, part, 'x')) shape.push_back(std::stoull(part));
  return shape;
}

[[noreturn]] void Corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptBlob, "corrupt checkpoint: " + what);
}

}  // namespace

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto named = ckpt.params.Named();
  if (ckpt.adam.m.size() != named.size() || ckpt.adam.v.size() != named.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match parameters");
  }
  std::vector<std::pair<std::string, std::pair<ad::Shape, std::string>>> blobs;
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& t = named[i].tensor;
    blobs.push_back({"param/" + named[i].name, {t.shape(), EncodeFloats(t.values())}});
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    blobs.push_back(
        {"adam_m/" + named[i].name, {named[i].tensor.shape(), EncodeFloats(ckpt.adam.m[i])}});
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    blobs.push_back(
        {"adam_v/" + named[i].name, {named[i].tensor.shape(), EncodeFloats(ckpt.adam.v[i])}});
  }

  std::ostringstream manifest;
  manifest << kMagic << ' ' << kFormatVersion << '\n';
  manifest << "config " << ckpt.config.ToJson() << '\n';
  manifest << "vocab_size " << ckpt.vocab_size << '\n';
  manifest << "vocab_digest " << ckpt.vocab_digest << '\n';
  manifest << "epochs_done " << ckpt.epochs_done << '\n';
  manifest << "adam_step " << ckpt.adam.step << '\n';
  manifest << "blobs " << blobs.size() << '\n';
  std::uint64_t offset = 0;
  for (const auto& [name, blob] : blobs) {
    char crc[9];
    std::snprintf(crc, sizeof(crc), "%08x", Crc32(blob.second));
    manifest << "blob " << name << ' ' << ShapeField(blob.first) << ' ' << offset << ' '
             << blob.second.size() << ' ' << crc << '\n';
    offset += blob.second.size();
  }
  manifest << "end\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << manifest.str();
  for (const auto& [name, blob] : blobs) out.write(blob.second.data(), blob.second.size());
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          const std::optional<TrainConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  std::string line;
  auto next_line = [&](const char* key) {
    if (!std::getline(in, line)) Corrupt(std::string("missing ") + key);
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) Corrupt(std::string("expected ") + key);
    return line.substr(prefix.size());
  };
  auto to_u64 = [](const std::string& s, const char* key) -> std::uint64_t {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) Corrupt(std::string("bad ") + key);
      return v;
    } catch (const std::logic_error&) {
      Corrupt(std::string("bad ") + key);
    }
  };

  const std::string version = next_line(kMagic);
  if (version != std::to_string(kFormatVersion)) {
    throw Error(ErrorCode::kVersionMismatch,
                "checkpoint format version " + version + ", this build reads " +
                    std::to_string(kFormatVersion));
  }
  Checkpoint ckpt;
  try {
    ckpt.config = TrainConfig::FromJson(next_line("config"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptBlob) throw;
    Corrupt(e.what());
  }
  ckpt.vocab_size = to_u64(next_line("vocab_size"), "vocab_size");
  ckpt.vocab_digest = next_line("vocab_digest");
  ckpt.epochs_done = to_u64(next_line("epochs_done"), "epochs_done");
  ckpt.adam.step = to_u64(next_line("adam_step"), "adam_step");
  const std::uint64_t count = to_u64(next_line("blobs"), "blobs");

  std::map<std::string, BlobEntry> entries;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::istringstream fields(next_line("blob"));
    std::string name, shape, crc;
    BlobEntry e;
    if (!(fields >> name >> shape >> e.offset >> e.bytes >> crc)) Corrupt("bad blob line");
    try {
      e.shape = ParseShape(shape);
      e.crc = static_cast<std::uint32_t>(std::stoul(crc, nullptr, 16));
    } catch (const std::logic_error&) {
      Corrupt("bad blob line for " + name);
    }
    entries[name] = e;
  }
  if (!std::getline(in, line) || line != "end") Corrupt("missing end of manifest");
  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const ModelDims stored{ckpt.vocab_size, ckpt.config.emb_dim, ckpt.config.hidden};
  if (expected && (expected->hidden != stored.hidden || expected->emb_dim != stored.emb_dim)) {
    throw Error(ErrorCode::kShapeMismatch,
                "checkpoint has hidden=" + std::to_string(stored.hidden) +
                    " emb_dim=" + std::to_string(stored.emb_dim) + ", expected hidden=" +
                    std::to_string(expected->hidden) +
                    " emb_dim=" + std::to_string(expected->emb_dim));
  }

  // Template parameters give the expected names and shapes.
  ModelParams params = InitModel(
      stored, EmbeddingTable{stored.vocab, stored.emb_dim,
                             std::vector<float>(stored.vocab * stored.emb_dim, 0.0f)},
      0);
  auto read_blob = [&](const std::string& name, const ad::Shape& shape) {
    auto it = entries.find(name);
    if (it == entries.end()) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint lacks blob " + name);
    }
    const BlobEntry& e = it->second;
    if (e.shape != shape) {
      throw Error(ErrorCode::kShapeMismatch, "blob " + name + " has shape " +
                                                 ad::ShapeToString(e.shape) + ", expected " +
                                                 ad::ShapeToString(shape));
    }
    if (e.bytes != ad::NumElements(shape) * 4) Corrupt("size of " + name);
    if (e.offset > payload.size() || e.bytes > payload.size() - e.offset) {
      Corrupt("blob " + name + " is truncated");
    }
    const std::string bytes = payload.substr(e.offset, e.bytes);
    if (Crc32(bytes) != e.crc) Corrupt("checksum mismatch in " + name);
    return DecodeFloats(bytes);
  };

  for (auto& [name, tensor] : params.Named()) {
    const auto values = read_blob("param/" + name, tensor.shape());
    auto dst = ad::Tensor(tensor).mutable_values();
    std::copy(values.begin(), values.end(), dst.begin());
    ckpt.adam.m.push_back(read_blob("adam_m/" + name, tensor.shape()));
    ckpt.adam.v.push_back(read_blob("adam_v/" + name, tensor.shape()));
  }
  ckpt.params = std::move(params);
  return ckpt;
}

}  // namespace channelsum
