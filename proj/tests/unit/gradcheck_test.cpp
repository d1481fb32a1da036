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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "channelsum/error.hpp"
#include "channelsum/gradcheck.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {
namespace {

using ad::Tensor;

TEST(GradCheck, FullLossPassesForSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GradCheckConfig cfg;
    cfg.seed = seed;
    const GradCheckReport r = GradCheck(cfg);
    EXPECT_TRUE(r.passed) << r.ToJson();
    EXPECT_LT(r.max_rel_err, 1e-4);
    EXPECT_EQ(r.tensors.size(), 16u);
  }
}

TEST(GradCheck, ZeroWeightPlateau) {
  GradCheckConfig cfg;
  cfg.zero_weights = true;
  const GradCheckReport r = GradCheck(cfg);
  EXPECT_TRUE(r.passed) << r.ToJson();
}

// y = x^2 with a deliberately wrong backward rule (dy/dx = 3x).
Tensor BadSquare(const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * x.values()[i];
  return Tensor::MakeOp("bad_square", x.shape(), std::move(out), {x}, [](ad::Node& self) {
    ad::Node& in = *self.parents[0];
    auto& g = in.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 3.0 * in.value[i] * self.grad[i];
  });
}

TEST(GradCheck, CorruptedBackwardRuleFails) {
  Tensor x = Tensor::Parameter({3}, {0.4, -1.2, 0.7});
  const std::vector<NamedTensor> params{{"x", x}};
  const GradCheckReport bad =
      CheckGradients(params, [&] { return ad::Sum(BadSquare(x)); }, 1e-5, 1e-4);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.worst_param, "x");
  EXPECT_NEAR(bad.max_rel_err, 1.0 / 3.0, 1e-6);  // |3x - 2x| / |3x|

  const GradCheckReport good =
      CheckGradients(params, [&] { return ad::Sum(ad::Mul(x, x)); }, 1e-5, 1e-4);
  EXPECT_TRUE(good.passed);
  const auto j = nlohmann::json::parse(good.ToJson());
  EXPECT_EQ(j["tensors"].size(), 1u);
}

TEST(GradCheck, ConfigValidation) {
  GradCheckConfig cfg;
  cfg.doc_sentences = 1;
  EXPECT_THROW(cfg.Validate(), Error);
  GradCheckConfig eps;
  eps.epsilon = 0.0;
  EXPECT_THROW(eps.Validate(), Error);
}

}  // namespace
}  // namespace channelsum
