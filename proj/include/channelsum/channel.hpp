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

// The salience model log P(D|S).
//
// Each document sentence d_i attends over the summary sentences with raw dot
// products, the attended summary vector s̄_i is combined with d_i as
// [d_i; s̄_i; d_i * s̄_i] and scored by the MLP head. The document probability
// is the product of the per-sentence sigmoids, accumulated as a sum of logs.

#pragma once

#include <string>
#include <vector>

#include "channelsum/corpus.hpp"
#include "channelsum/encoder.hpp"
#include "channelsum/model.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {

// Per-sentence probabilities are clamped to [kProbFloor, 1 - kProbFloor]
// before taking logs.
inline constexpr double kProbFloor = 1e-12;

struct AttentionMatrix {
  std::size_t rows = 0;  // |D|
  std::size_t cols = 0;  // |S|
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Plain values of one salience evaluation.
struct SalienceResult {
  double log_p = 0.0;
  std::vector<double> per_sentence;
  AttentionMatrix attention;
};

// Graph handles of one salience evaluation.
struct SalienceGraph {
  ad::Tensor log_p;         // scalar
  ad::Tensor per_sentence;  // (|D|)
  ad::Tensor attention;     // (|D|, |S|)

  SalienceResult Values() const;
};

// Row-wise softmax of doc_vecs @ sum_vecs^T. Inputs are (|D|, H) and (|S|, H).
// Throws kEmptyInput when either side has no rows.
ad::Tensor Attention(const ad::Tensor& doc_vecs, const ad::Tensor& sum_vecs);

// Scores pre-encoded sentences. Dropout is applied to the MLP input.
SalienceGraph SalienceFromVectors(const ad::Tensor& doc_vecs,
                                  const ad::Tensor& sum_vecs,
                                  const MlpParams& mlp, const ForwardMode& mode);

// Encodes every sentence of both sides with the shared GRU, then scores.
SalienceGraph Salience(const Document& doc, const SummaryCandidate& summary,
                       const ModelParams& params, const ForwardMode& mode);

// Inference-only convenience: no graph is recorded.
SalienceResult EvaluateSalience(const Document& doc, const SummaryCandidate& summary,
                                const ModelParams& params);

// || A^T A - (|D|/|S|) I ||_F
ad::Tensor Penalization(const ad::Tensor& attention);

// {"id": ..., "rows": |D|, "cols": |S|, "attention": [[...], ...]}
std::string AttentionToJson(const std::string& id, const AttentionMatrix& a);

}  // namespace channelsum
