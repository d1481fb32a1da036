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

#include "channelsum/encoder.hpp"

#include <algorithm>

#include "channelsum/error.hpp"

namespace channelsum {

using ad::Tensor;

Tensor EncodeSentence(std::span<const TokenId> tokens, const Tensor& embedding,
                      const GruParams& gru, const ForwardMode& mode) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptySentence, "cannot encode an empty sentence");
  tokens = tokens.first(std::min(tokens.size(), kMaxSentenceTokens));
  const std::size_t hidden = gru.u_z.dim(0);

  Tensor x = ad::GatherRows(embedding, tokens);
  if (mode.training && mode.dropout > 0.0) {
    x = ad::Dropout(x, mode.dropout, true, *mode.rng);
  }
  // Input projections for every step at once: (T, hidden) each.
  const Tensor xz = ad::MatMul(x, gru.w_z);
  const Tensor xr = ad::MatMul(x, gru.w_r);
  const Tensor xh = ad::MatMul(x, gru.w_h);

  Tensor h = Tensor::Zeros({hidden});
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Tensor z = ad::Sigmoid(
        ad::Add(ad::Add(ad::Row(xz, t), ad::MatMul(h, gru.u_z)), gru.b_z));
    const Tensor r = ad::Sigmoid(
        ad::Add(ad::Add(ad::Row(xr, t), ad::MatMul(h, gru.u_r)), gru.b_r));
    const Tensor candidate = ad::Tanh(ad::Add(
        ad::Add(ad::Row(xh, t), ad::MatMul(ad::Mul(r, h), gru.u_h)), gru.b_h));
    // (1 - z) * h + z * candidate
    h = ad::Add(h, ad::Mul(z, ad::Sub(candidate, h)));
  }
  return h;
}

}  // namespace channelsum
