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

#include "channelsum/adam.hpp"

#include <cmath>

#include "channelsum/error.hpp"

namespace channelsum {

Adam::Adam(std::vector<ad::Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (const auto& p : params_) {
    state_.m.emplace_back(p.numel(), 0.0f);
    state_.v.emplace_back(p.numel(), 0.0f);
  }
}

Adam::Adam(std::vector<ad::Tensor> params, AdamConfig config, AdamState state)
    : params_(std::move(params)), config_(config), state_(std::move(state)) {
  if (state_.m.size() != params_.size() || state_.v.size() != params_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (state_.m[i].size() != params_[i].numel() ||
        state_.v[i].size() != params_[i].numel()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "optimizer moments for parameter " + std::to_string(i) +
                      " have the wrong size");
    }
  }
}

void Adam::Step() {
  ++state_.step;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    auto values = p.mutable_values();
    auto grad = p.mutable_grad();
    auto& m = state_.m[i];
    auto& v = state_.v[i];
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double g = grad[k];
      const double mk = b1 * m[k] + (1.0 - b1) * g;
      const double vk = b2 * v[k] + (1.0 - b2) * g * g;
      m[k] = static_cast<float>(mk);
      v[k] = static_cast<float>(vk);
      const double update = config_.lr * (mk / c1) / (std::sqrt(vk / c2) + config_.eps);
      values[k] = static_cast<float>(values[k] - update);
    }
  }
}

}  // namespace channelsum
