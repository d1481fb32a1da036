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
#include <vector>

#include "channelsum/tensor.hpp"

namespace channelsum {

struct AdamConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment estimates are stored at float precision, one buffer per parameter,
// so that a checkpoint captures the optimizer exactly.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
};

class Adam {
 public:
  Adam(std::vector<ad::Tensor> params, AdamConfig config);
  Adam(std::vector<ad::Tensor> params, AdamConfig config, AdamState state);

  // One bias-corrected update from the parameters' current gradients.
  // Arithmetic is done in double; parameters and moments are then rounded
  // to float.
  void Step();

  const AdamState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<ad::Tensor> params_;
  AdamConfig config_;
  AdamState state_;
};

}  // namespace channelsum
