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

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "channelsum/corpus.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {

struct ModelDims {
  std::size_t vocab = 0;
  std::size_t emb_dim = 300;
  std::size_t hidden = 1024;

  // MLP widths taper hidden -> hidden/4 -> 1 (1024 -> 256 -> 1 at full size).
  std::size_t mlp_hidden1() const { return hidden; }
  std::size_t mlp_hidden2() const { return hidden >= 4 ? hidden / 4 : 1; }
};

// Single-layer GRU. Input weights are (emb_dim, hidden), recurrent weights
// (hidden, hidden), so gates are computed as x W + h U + b.
struct GruParams {
  ad::Tensor w_z, w_r, w_h;
  ad::Tensor u_z, u_r, u_h;
  ad::Tensor b_z, b_r, b_h;
};

// Three linear layers: (3*hidden -> h1) relu (h1 -> h2) relu (h2 -> 1).
struct MlpParams {
  ad::Tensor w1, b1;
  ad::Tensor w2, b2;
  ad::Tensor w3, b3;
};

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

struct ModelParams {
  ad::Tensor embedding;  // (vocab, emb_dim), finetuned
  GruParams gru;
  MlpParams mlp;

  // Fixed order; checkpoints and the optimizer rely on it.
  std::vector<NamedTensor> Named() const;
  std::vector<ad::Tensor> Tensors() const;
  ModelDims dims() const;
  void ZeroGrad();
  // Deep copy with fresh gradient slots.
  ModelParams Clone() const;
};

// Glorot-uniform weights with bound sqrt(6 / (fan_in + fan_out)), zero biases.
// Values are rounded to float precision.
GruParams InitGru(std::size_t emb_dim, std::size_t hidden, std::mt19937_64& rng);
MlpParams InitMlp(std::size_t hidden, std::mt19937_64& rng);

// Embedding rows come from `embeddings`; the rest is drawn from `seed`.
ModelParams InitModel(const ModelDims& dims, const EmbeddingTable& embeddings,
                      std::uint64_t seed);

// Round every value to the nearest float.
void RoundToFloat(std::span<double> values);

}  // namespace channelsum
