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

#include "channelsum/model.hpp"

#include <cmath>

#include "channelsum/error.hpp"

namespace channelsum {
namespace {

ad::Tensor Glorot(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(fan_in * fan_out);
  for (auto& x : v) {
    // Rounding can land exactly on the bound; redraw in that case.
    do {
      x = static_cast<float>(dist(rng));
    } while (std::abs(x) >= bound);
  }
  return ad::Tensor::Parameter({fan_in, fan_out}, std::move(v));
}

ad::Tensor ZeroBias(std::size_t n) {
  return ad::Tensor::Parameter({n}, std::vector<double>(n, 0.0));
}

ad::Tensor CloneTensor(const ad::Tensor& t) {
  return ad::Tensor::Parameter(t.shape(),
                               std::vector<double>(t.values().begin(), t.values().end()));
}

}  // namespace

std::vector<NamedTensor> ModelParams::Named() const {
  return {
      {"embedding", embedding},
      {"gru.w_z", gru.w_z}, {"gru.w_r", gru.w_r}, {"gru.w_h", gru.w_h},
      {"gru.u_z", gru.u_z}, {"gru.u_r", gru.u_r}, {"gru.u_h", gru.u_h},
      {"gru.b_z", gru.b_z}, {"gru.b_r", gru.b_r}, {"gru.b_h", gru.b_h},
      {"mlp.w1", mlp.w1},   {"mlp.b1", mlp.b1},   {"mlp.w2", mlp.w2},
      {"mlp.b2", mlp.b2},   {"mlp.w3", mlp.w3},   {"mlp.b3", mlp.b3},
  };
}

std::vector<ad::Tensor> ModelParams::Tensors() const {
  std::vector<ad::Tensor> out;
  for (auto& n : Named()) out.push_back(n.tensor);
  return out;
}

ModelDims ModelParams::dims() const {
  ModelDims d;
  d.vocab = embedding.dim(0);
  d.emb_dim = embedding.dim(1);
  d.hidden = gru.u_z.dim(0);
  return d;
}

void ModelParams::ZeroGrad() {
  for (auto& t : Tensors()) t.ZeroGrad();
}

ModelParams ModelParams::Clone() const {
  ModelParams c;
  c.embedding = CloneTensor(embedding);
  c.gru = {CloneTensor(gru.w_z), CloneTensor(gru.w_r), CloneTensor(gru.w_h),
           CloneTensor(gru.u_z), CloneTensor(gru.u_r), CloneTensor(gru.u_h),
           CloneTensor(gru.b_z), CloneTensor(gru.b_r), CloneTensor(gru.b_h)};
  c.mlp = {CloneTensor(mlp.w1), CloneTensor(mlp.b1), CloneTensor(mlp.w2),
           CloneTensor(mlp.b2), CloneTensor(mlp.w3), CloneTensor(mlp.b3)};
  return c;
}

GruParams InitGru(std::size_t emb_dim, std::size_t hidden, std::mt19937_64& rng) {
  GruParams p;
  p.w_z = Glorot(emb_dim, hidden, rng);
  p.w_r = Glorot(emb_dim, hidden, rng);
  p.w_h = Glorot(emb_dim, hidden, rng);
  p.u_z = Glorot(hidden, hidden, rng);
  p.u_r = Glorot(hidden, hidden, rng);
  p.u_h = Glorot(hidden, hidden, rng);
  p.b_z = ZeroBias(hidden);
  p.b_r = ZeroBias(hidden);
  p.b_h = ZeroBias(hidden);
  return p;
}

MlpParams InitMlp(std::size_t hidden, std::mt19937_64& rng) {
  ModelDims d;
  d.hidden = hidden;
  MlpParams p;
  p.w1 = Glorot(3 * hidden, d.mlp_hidden1(), rng);
  p.b1 = ZeroBias(d.mlp_hidden1());
  p.w2 = Glorot(d.mlp_hidden1(), d.mlp_hidden2(), rng);
  p.b2 = ZeroBias(d.mlp_hidden2());
  p.w3 = Glorot(d.mlp_hidden2(), 1, rng);
  p.b3 = ZeroBias(1);
  return p;
}

ModelParams InitModel(const ModelDims& dims, const EmbeddingTable& embeddings,
                      std::uint64_t seed) {
  if (embeddings.rows != dims.vocab || embeddings.dim != dims.emb_dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding table is " + std::to_string(embeddings.rows) + "x" +
                    std::to_string(embeddings.dim) + ", model expects " +
                    std::to_string(dims.vocab) + "x" + std::to_string(dims.emb_dim));
  }
  if (dims.hidden == 0 || dims.emb_dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "hidden and emb_dim must be positive");
  }
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.embedding = ad::Tensor::Parameter(
      {dims.vocab, dims.emb_dim},
      std::vector<double>(embeddings.values.begin(), embeddings.values.end()));
  p.gru = InitGru(dims.emb_dim, dims.hidden, rng);
  p.mlp = InitMlp(dims.hidden, rng);
  return p;
}

void RoundToFloat(std::span<double> values) {
  for (auto& v : values) v = static_cast<float>(v);
}

}  // namespace channelsum
