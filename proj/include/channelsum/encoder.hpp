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

#include <random>
#include <span>

#include "channelsum/corpus.hpp"
#include "channelsum/model.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {

// Longer sentences are truncated to their first kMaxSentenceTokens tokens.
inline constexpr std::size_t kMaxSentenceTokens = 100;

// Dropout settings for one forward pass. With training == false no random
// numbers are drawn and `rng` may be null.
struct ForwardMode {
  bool training = false;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;

  static ForwardMode Inference() { return {}; }
};

// Runs the GRU over the embedded tokens from h_0 = 0 and returns h_T, shape
// (hidden). Dropout is applied to the embedded tokens. Throws kEmptySentence.
ad::Tensor EncodeSentence(std::span<const TokenId> tokens,
                          const ad::Tensor& embedding, const GruParams& gru,
                          const ForwardMode& mode);

}  // namespace channelsum
