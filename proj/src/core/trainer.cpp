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

#include "channelsum/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include <json.hpp>

#include "channelsum/error.hpp"
#include "channelsum/logging.hpp"

namespace channelsum {
namespace {

constexpr std::uint32_t kShuffleTag = 0x5348u;
constexpr std::uint32_t kPairTag = 0x5041u;

std::mt19937_64 DerivedRng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t position,
                           std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32),
                    static_cast<std::uint32_t>(position),
                    static_cast<std::uint32_t>(position >> 32), tag};
  return std::mt19937_64(seq);
}

void CheckDims(const ModelParams& params, const TrainConfig& config) {
  const ModelDims d = params.dims();
  if (d.hidden != config.hidden || d.emb_dim != config.emb_dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "model has hidden=" + std::to_string(d.hidden) +
                    " emb_dim=" + std::to_string(d.emb_dim) + ", config asks for hidden=" +
                    std::to_string(config.hidden) +
                    " emb_dim=" + std::to_string(config.emb_dim));
  }
}

struct PairOutcome {
  bool skipped = false;
  LossBreakdown loss;
};

// Builds the pair, runs forward and backward on `params`. Gradients are left
// in the parameters' grad buffers.
PairOutcome RunPair(const TrainingExample& ex, const ModelParams& params,
                    const TrainConfig& config, std::uint64_t epoch, std::uint64_t position) {
  std::mt19937_64 rng = DerivedRng(config.seed, epoch, position, kPairTag);
  PairOutcome out;
  ContrastivePair pair;
  try {
    pair = MakeContrastive(ex.doc, ex.gold, rng);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooShortDocument) throw;
    Log().warn("skipping {}: {}", ex.id, e.what());
    out.skipped = true;
    return out;
  }
  const ForwardMode mode{true, config.dropout, &rng};
  LossGraph loss = ContrastiveLoss(pair, params, config.alpha, mode);
  if (!std::isfinite(loss.values.total)) {
    throw Error(ErrorCode::kNonFiniteLoss,
                "non-finite loss at " + ex.id + " (epoch " + std::to_string(epoch) + ")");
  }
  ad::Backward(loss.total);
  out.loss = loss.values;
  return out;
}

}  // namespace

void TrainConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(lr >= 0.0) || !std::isfinite(lr)) fail("lr must be >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (hidden == 0 || emb_dim == 0) fail("hidden and emb_dim must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must be in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
  if (workers == 0) fail("workers must be >= 1");
}

std::string TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["lr"] = lr;
  j["alpha"] = alpha;
  j["dropout"] = dropout;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["hidden"] = hidden;
  j["emb_dim"] = emb_dim;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["workers"] = workers;
  j["log_every"] = log_every;
  return j.dump();
}

TrainConfig TrainConfig::FromJson(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "config is not a JSON object");
  }
  TrainConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.alpha = j.value("alpha", c.alpha);
    c.dropout = j.value("dropout", c.dropout);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.hidden = j.value("hidden", c.hidden);
    c.emb_dim = j.value("emb_dim", c.emb_dim);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.workers = j.value("workers", c.workers);
    c.log_every = j.value("log_every", c.log_every);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad config field: ") + e.what());
  }
  return c;
}

std::vector<TrainingExample> PrepareExamples(std::span<const RawPair> raw,
                                             const Vocabulary& vocab, std::size_t* skipped) {
  std::vector<TrainingExample> out;
  out.reserve(raw.size());
  std::size_t n_skipped = 0;
  for (const auto& r : raw) {
    try {
      auto [doc, gold] = PreprocessPair(r, vocab);
      out.push_back({r.id, std::move(doc), std::move(gold)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyAfterFilter) throw;
      Log().warn("skipping {}", e.what());
      ++n_skipped;
    }
  }
  if (skipped) *skipped = n_skipped;
  return out;
}

Checkpoint InitCheckpoint(const Vocabulary& vocab, const EmbeddingTable& embeddings,
                          const TrainConfig& config) {
  config.Validate();
  Checkpoint c;
  c.config = config;
  c.vocab_size = vocab.size();
  c.vocab_digest = vocab.Digest();
  ModelDims dims;
  dims.vocab = vocab.size();
  dims.emb_dim = config.emb_dim;
  dims.hidden = config.hidden;
  c.params = InitModel(dims, embeddings, config.seed);
  c.adam = channelsum::Adam(c.params.Tensors(), config.Adam()).state();
  return c;
}

TrainStats Train(std::span<const TrainingExample> corpus, Checkpoint& ckpt,
                 const TrainConfig& config, const StepCallback& on_step) {
  config.Validate();
  CheckDims(ckpt.params, config);
  channelsum::Adam optimizer(ckpt.params.Tensors(), config.Adam(), ckpt.adam);
  ckpt.params.ZeroGrad();

  TrainStats stats;
  double loss_sum = 0.0;
  double window_sum = 0.0;
  std::uint64_t window_n = 0;

  auto record = [&](std::uint64_t epoch, const TrainingExample& ex, const LossBreakdown& loss) {
    ++stats.steps;
    loss_sum += loss.total;
    window_sum += loss.total;
    ++window_n;
    if (config.log_every > 0 && window_n == config.log_every) {
      Log().info("epoch {} step {}: mean loss {:.6f}", epoch, optimizer.state().step,
                 window_sum / static_cast<double>(window_n));
      window_sum = 0.0;
      window_n = 0;
    }
    if (on_step) on_step({epoch, optimizer.state().step, ex.id, loss});
  };

  std::vector<ModelParams> replicas;
  std::vector<std::vector<ad::Tensor>> replica_tensors;
  for (std::size_t w = 0; config.workers > 1 && w < config.workers; ++w) {
    replicas.push_back(ckpt.params.Clone());
    replica_tensors.push_back(replicas.back().Tensors());
  }

  for (std::uint64_t epoch = ckpt.epochs_done; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng = DerivedRng(config.seed, epoch, 0, kShuffleTag);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    if (config.workers <= 1) {
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const TrainingExample& ex = corpus[order[pos]];
        const PairOutcome out = RunPair(ex, ckpt.params, config, epoch, pos);
        if (out.skipped) {
          ++stats.skipped;
          continue;
        }
        optimizer.Step();
        ckpt.params.ZeroGrad();
        record(epoch, ex, out.loss);
      }
    } else {
      const auto master = ckpt.params.Tensors();
      for (std::size_t start = 0; start < order.size(); start += config.workers) {
        const std::size_t count = std::min(config.workers, order.size() - start);
        std::vector<PairOutcome> outcomes(count);
        std::vector<std::exception_ptr> errors(count);
        {
          std::vector<std::jthread> threads;
          for (std::size_t w = 0; w < count; ++w) {
            threads.emplace_back([&, w] {
              try {
                outcomes[w] = RunPair(corpus[order[start + w]], replicas[w], config, epoch,
                                      start + w);
              } catch (...) {
                errors[w] = std::current_exception();
              }
            });
          }
        }
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
        std::size_t used = 0;
        for (const auto& o : outcomes) used += o.skipped ? 0 : 1;
        stats.skipped += count - used;
        if (used == 0) continue;
        for (std::size_t k = 0; k < master.size(); ++k) {
          auto dst = ad::Tensor(master[k]).mutable_grad();
          for (std::size_t w = 0; w < count; ++w) {
            if (outcomes[w].skipped) continue;
            auto src = replica_tensors[w][k].mutable_grad();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
          }
          for (auto& g : dst) g /= static_cast<double>(used);
        }
        optimizer.Step();
        ckpt.params.ZeroGrad();
        for (std::size_t w = 0; w < replicas.size(); ++w) {
          for (std::size_t k = 0; k < master.size(); ++k) {
            auto dst = replica_tensors[w][k].mutable_values();
            const auto src = master[k].values();
            std::copy(src.begin(), src.end(), dst.begin());
          }
          replicas[w].ZeroGrad();
        }
        for (std::size_t w = 0; w < count; ++w) {
          if (!outcomes[w].skipped) record(epoch, corpus[order[start + w]], outcomes[w].loss);
        }
      }
    }
    ckpt.epochs_done = epoch + 1;
    ckpt.adam = optimizer.state();
  }
  ckpt.adam = optimizer.state();
  ckpt.config = config;
  if (stats.steps > 0) stats.mean_loss = loss_sum / static_cast<double>(stats.steps);
  return stats;
}

}  // namespace channelsum
