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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "channelsum/model.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {

struct TensorCheck {
  std::string name;
  double rel_err = 0.0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
};

struct GradCheckReport {
  std::uint64_t seed = 0;
  double max_rel_err = 0.0;
  std::string worst_param;
  double tolerance = 0.0;
  bool passed = false;
  std::vector<TensorCheck> tensors;

  std::string ToJson() const;
};

// Must rebuild the graph from the current parameter values and be a pure
// function of them (reseed any dropout inside).
using LossFn = std::function<ad::Tensor()>;

// Compares Backward() against central differences, element by element. The
// error of one tensor is ||analytic - numeric|| / max(||analytic||, ||numeric||)
// (zero when both vanish); the report keeps the worst tensor.
GradCheckReport CheckGradients(std::span<const NamedTensor> params, const LossFn& loss,
                               double epsilon, double tolerance);

struct GradCheckConfig {
  std::uint64_t seed = 7;
  std::size_t hidden = 8;
  std::size_t emb_dim = 8;
  std::size_t vocab = 16;
  std::size_t doc_sentences = 4;
  std::size_t summary_sentences = 2;
  std::size_t max_tokens = 4;
  double alpha = 1.0;
  double dropout = 0.3;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // All weights and embeddings zero: every sigmoid sits at 0.5.
  bool zero_weights = false;

  // Throws kInvalidArgument.
  void Validate() const;
};

// Random model, document and gold summary drawn from `seed`, one contrastive
// pair, and the full training loss (contrastive term plus alpha * penalty)
// with dropout on and a fixed mask.
GradCheckReport GradCheck(const GradCheckConfig& config);

}  // namespace channelsum
