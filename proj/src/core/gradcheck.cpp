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

#include "channelsum/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "channelsum/contrastive.hpp"
#include "channelsum/error.hpp"

namespace channelsum {

std::string GradCheckReport::ToJson() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["max_rel_err"] = max_rel_err;
  j["worst_param"] = worst_param;
  j["tolerance"] = tolerance;
  j["passed"] = passed;
  auto& per = j["tensors"] = nlohmann::ordered_json::array();
  for (const auto& t : tensors) {
    per.push_back({{"name", t.name},
                   {"rel_err", t.rel_err},
                   {"analytic_norm", t.analytic_norm},
                   {"numeric_norm", t.numeric_norm}});
  }
  return j.dump();
}

GradCheckReport CheckGradients(std::span<const NamedTensor> params, const LossFn& loss,
                               double epsilon, double tolerance) {
  for (const auto& p : params) ad::Tensor(p.tensor).ZeroGrad();
  ad::Backward(loss());

  GradCheckReport report;
  report.tolerance = tolerance;
  for (const auto& p : params) {
    ad::Tensor t = p.tensor;
    auto values = t.mutable_values();
    std::vector<double> analytic(values.size(), 0.0);
    if (t.has_grad()) {
      const auto g = t.grad();
      std::copy(g.begin(), g.end(), analytic.begin());
    }
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    {
      ad::NoGradGuard no_grad;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        values[i] = saved + epsilon;
        const double up = loss().item();
        values[i] = saved - epsilon;
        const double down = loss().item();
        values[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
        a2 += analytic[i] * analytic[i];
        n2 += numeric * numeric;
      }
    }
    TensorCheck check;
    check.name = p.name;
    check.analytic_norm = std::sqrt(a2);
    check.numeric_norm = std::sqrt(n2);
    const double scale = std::max(check.analytic_norm, check.numeric_norm);
    check.rel_err = scale > 0.0 ? std::sqrt(diff2) / scale : 0.0;
    if (!std::isfinite(check.rel_err)) check.rel_err = std::numeric_limits<double>::infinity();
    if (report.worst_param.empty() || check.rel_err > report.max_rel_err) {
      report.max_rel_err = check.rel_err;
      report.worst_param = check.name;
    }
    report.tensors.push_back(std::move(check));
  }
  report.passed = report.max_rel_err < tolerance;
  return report;
}

void GradCheckConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (hidden == 0 || emb_dim == 0) fail("hidden and emb_dim must be positive");
  if (vocab < 3) fail("vocab must be >= 3");
  if (doc_sentences < 2) fail("doc_sentences must be >= 2");
  if (summary_sentences == 0) fail("summary_sentences must be >= 1");
  if (max_tokens == 0) fail("max_tokens must be >= 1");
  if (!(alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(tolerance > 0.0)) fail("tolerance must be > 0");
}

GradCheckReport GradCheck(const GradCheckConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);

  ModelDims dims;
  dims.vocab = config.vocab;
  dims.emb_dim = config.emb_dim;
  dims.hidden = config.hidden;
  EmbeddingTable table{dims.vocab, dims.emb_dim,
                       std::vector<float>(dims.vocab * dims.emb_dim, 0.0f)};
  ModelParams params = InitModel(dims, table, config.seed);
  if (config.zero_weights) {
    for (auto& t : params.Tensors()) {
      auto v = ad::Tensor(t).mutable_values();
      std::fill(v.begin(), v.end(), 0.0);
    }
  } else {
    // Unit-scale embeddings and non-zero biases keep every path active.
    std::uniform_real_distribution<double> emb(-1.0, 1.0);
    for (auto& v : params.embedding.mutable_values()) v = emb(rng);
    std::uniform_real_distribution<double> bias(-0.1, 0.1);
    for (ad::Tensor b : {params.gru.b_z, params.gru.b_r, params.gru.b_h, params.mlp.b1,
                         params.mlp.b2, params.mlp.b3}) {
      for (auto& v : b.mutable_values()) v = bias(rng);
    }
  }

  std::uniform_int_distribution<TokenId> token(0, static_cast<TokenId>(config.vocab - 1));
  std::uniform_int_distribution<std::size_t> length(1, config.max_tokens);
  auto random_sentence = [&] {
    Sentence s;
    s.tokens.resize(length(rng));
    for (auto& t : s.tokens) t = token(rng);
    return s;
  };
  Document doc;
  for (std::size_t i = 0; i < config.doc_sentences; ++i) doc.sentences.push_back(random_sentence());
  SummaryCandidate gold;
  for (std::size_t j = 0; j < config.summary_sentences; ++j) {
    gold.sentences.push_back(random_sentence());
  }
  const ContrastivePair pair = MakeContrastive(doc, gold, rng);
  const std::uint64_t dropout_seed = rng();

  const LossFn loss = [&] {
    std::mt19937_64 mask_rng(dropout_seed);
    const ForwardMode mode{true, config.dropout, &mask_rng};
    return ContrastiveLoss(pair, params, config.alpha, mode).total;
  };
  const auto named = params.Named();
  GradCheckReport report = CheckGradients(named, loss, config.epsilon, config.tolerance);
  report.seed = config.seed;
  return report;
}

}  // namespace channelsum
