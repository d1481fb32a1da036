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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "channelsum/adam.hpp"
#include "channelsum/contrastive.hpp"
#include "channelsum/corpus.hpp"
#include "channelsum/model.hpp"

namespace channelsum {

struct TrainConfig {
  double lr = 1e-5;
  double alpha = 0.001;
  double dropout = 0.3;
  std::uint64_t epochs = 1;  // total, including epochs already in a checkpoint
  std::uint64_t seed = 0;
  std::size_t hidden = 1024;
  std::size_t emb_dim = 300;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // > 1 enables data-parallel steps: each step averages the gradients of
  // `workers` pairs. Not bit-compatible with the single-worker trajectory.
  std::size_t workers = 1;
  std::size_t log_every = 100;

  // Throws kInvalidArgument.
  void Validate() const;
  AdamConfig Adam() const { return {lr, adam_beta1, adam_beta2, adam_eps}; }
  std::string ToJson() const;
  static TrainConfig FromJson(const std::string& json);
};

struct TrainingExample {
  std::string id;
  Document doc;
  SummaryCandidate gold;
};

// Preprocesses raw pairs, skipping (and logging) those that fail.
std::vector<TrainingExample> PrepareExamples(std::span<const RawPair> raw,
                                             const Vocabulary& vocab,
                                             std::size_t* skipped = nullptr);

struct Checkpoint {
  TrainConfig config;
  std::size_t vocab_size = 0;
  std::string vocab_digest;
  ModelParams params;
  AdamState adam;
  std::uint64_t epochs_done = 0;
};

Checkpoint InitCheckpoint(const Vocabulary& vocab, const EmbeddingTable& embeddings,
                          const TrainConfig& config);

struct StepRecord {
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;  // global optimizer step after this update
  std::string id;
  LossBreakdown loss;
};
using StepCallback = std::function<void(const StepRecord&)>;

struct TrainStats {
  std::uint64_t steps = 0;
  std::uint64_t skipped = 0;
  double mean_loss = 0.0;  // over all steps of this call
};

// Runs epochs [ckpt.epochs_done, config.epochs) with batch size 1 (or
// `workers` in data-parallel mode). Each epoch visits the examples in an order
// shuffled from (seed, epoch); each pair's contrastive draw and dropout masks
// come from (seed, epoch, position). Throws kNonFiniteLoss.
TrainStats Train(std::span<const TrainingExample> corpus, Checkpoint& ckpt,
                 const TrainConfig& config, const StepCallback& on_step = {});

// Manifest text followed by little-endian float32 blobs; see checkpoint.cpp.
void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// When `expected` is set its hidden/emb_dim must match the stored shapes
// (kShapeMismatch). Also throws kVersionMismatch and kCorruptBlob.
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          const std::optional<TrainConfig>& expected = std::nullopt);

}  // namespace channelsum
