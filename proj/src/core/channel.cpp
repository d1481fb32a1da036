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

#include "channelsum/channel.hpp"

#include <json.hpp>

#include "channelsum/error.hpp"

namespace channelsum {

using ad::Tensor;

namespace {

// x @ w + b for every row of x.
Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  const Tensor ones = Tensor::Constant({x.dim(0)}, std::vector<double>(x.dim(0), 1.0));
  return ad::Add(ad::MatMul(x, w), ad::Outer(ones, b));
}

Tensor EncodeAll(const std::vector<Sentence>& sentences, const ModelParams& params,
                 const ForwardMode& mode) {
  std::vector<Tensor> rows;
  rows.reserve(sentences.size());
  for (const auto& s : sentences) {
    rows.push_back(EncodeSentence(s.tokens, params.embedding, params.gru, mode));
  }
  return ad::StackRows(rows);
}

}  // namespace

SalienceResult SalienceGraph::Values() const {
  SalienceResult r;
  r.log_p = log_p.item();
  r.per_sentence.assign(per_sentence.values().begin(), per_sentence.values().end());
  r.attention.rows = attention.dim(0);
  r.attention.cols = attention.dim(1);
  r.attention.values.assign(attention.values().begin(), attention.values().end());
  return r;
}

Tensor Attention(const Tensor& doc_vecs, const Tensor& sum_vecs) {
  if (doc_vecs.rank() != 2 || sum_vecs.rank() != 2 || doc_vecs.dim(0) == 0 ||
      sum_vecs.dim(0) == 0) {
    throw Error(ErrorCode::kEmptyInput,
                "attention needs non-empty document and summary matrices");
  }
  return ad::Softmax(ad::MatMul(doc_vecs, ad::Transpose(sum_vecs)));
}

SalienceGraph SalienceFromVectors(const Tensor& doc_vecs, const Tensor& sum_vecs,
                                  const MlpParams& mlp, const ForwardMode& mode) {
  SalienceGraph g;
  g.attention = Attention(doc_vecs, sum_vecs);
  const Tensor attended = ad::MatMul(g.attention, sum_vecs);  // (|D|, H)
  Tensor features =
      ad::Concat({doc_vecs, attended, ad::Mul(doc_vecs, attended)}, 1);
  if (mode.training && mode.dropout > 0.0) {
    features = ad::Dropout(features, mode.dropout, true, *mode.rng);
  }
  const Tensor h1 = ad::Relu(Linear(features, mlp.w1, mlp.b1));
  const Tensor h2 = ad::Relu(Linear(h1, mlp.w2, mlp.b2));
  const Tensor logits = Linear(h2, mlp.w3, mlp.b3);  // (|D|, 1)
  g.per_sentence = ad::Sigmoid(ad::Reshape(logits, {doc_vecs.dim(0)}));
  g.log_p = ad::Sum(ad::Log(ad::Clamp(g.per_sentence, kProbFloor, 1.0 - kProbFloor)));
  return g;
}

SalienceGraph Salience(const Document& doc, const SummaryCandidate& summary,
                       const ModelParams& params, const ForwardMode& mode) {
  if (doc.size() == 0 || summary.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "salience needs a non-empty document and summary");
  }
  const Tensor doc_vecs = EncodeAll(doc.sentences, params, mode);
  const Tensor sum_vecs = EncodeAll(summary.sentences, params, mode);
  return SalienceFromVectors(doc_vecs, sum_vecs, params.mlp, mode);
}

SalienceResult EvaluateSalience(const Document& doc, const SummaryCandidate& summary,
                                const ModelParams& params) {
  ad::NoGradGuard no_grad;
  return Salience(doc, summary, params, ForwardMode::Inference()).Values();
}

Tensor Penalization(const Tensor& attention) {
  if (attention.rank() != 2) {
    throw Error(ErrorCode::kShapeMismatch,
                "penalization expects a matrix, got " + ad::ShapeToString(attention.shape()));
  }
  const std::size_t d = attention.dim(0), s = attention.dim(1);
  std::vector<double> target(s * s, 0.0);
  const double diag = static_cast<double>(d) / static_cast<double>(s);
  for (std::size_t i = 0; i < s; ++i) target[i * s + i] = diag;
  const Tensor gram = ad::MatMul(ad::Transpose(attention), attention);
  return ad::FrobeniusNorm(ad::Sub(gram, Tensor::Constant({s, s}, std::move(target))));
}

std::string AttentionToJson(const std::string& id, const AttentionMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < a.cols; ++j) row.push_back(a.at(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json record = {
      {"id", id}, {"rows", a.rows}, {"cols", a.cols}, {"attention", std::move(rows)}};
  return record.dump();
}

}  // namespace channelsum
