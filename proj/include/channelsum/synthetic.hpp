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

// Planted-topic toy corpus and the train/measure loop run on it.
//
// Words are "w0" .. "w<vocab_words-1>"; the first `topic_words` of them are
// topic words, the rest filler. Every document plants `topic_sentences`
// sentences at random positions, each written mostly from its own small group
// of topic words, and fills the remaining positions with filler sentences
// that mention at most one of the document's topic words. The gold summary is
// the topic sentences in document order.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "channelsum/corpus.hpp"

namespace channelsum {

struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t train_pairs = 200;
  std::size_t heldout_pairs = 50;
  std::size_t doc_sentences = 8;
  std::size_t topic_sentences = 3;
  std::size_t vocab_words = 200;
  std::size_t topic_words = 40;
  std::size_t words_per_topic = 2;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 10;

  std::size_t hidden = 64;
  std::size_t emb_dim = 32;
  std::uint64_t epochs = 5;
  double lr = 1e-3;
  double alpha = 0.001;
  double dropout = 0.3;
  std::size_t l = 3;

  // Throws kInvalidArgument.
  void Validate() const;
  std::string ToJson() const;
};

struct SyntheticCorpus {
  std::vector<RawPair> train;
  std::vector<RawPair> heldout;
  // Document positions of the planted topic sentences, per held-out pair.
  std::vector<std::vector<std::size_t>> heldout_topics;
};

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config);

struct SyntheticResult {
  double alpha = 0.0;
  std::uint64_t epochs = 0;
  double final_epoch_loss = 0.0;   // mean training loss of the last epoch
  // Per held-out pair, the margin log P(D|S1) - log P(D|S2) averaged over
  // every (j', i2) the pair construction can draw.
  double mean_margin = 0.0;        // mean of that over held-out pairs
  double margin_positive = 0.0;    // fraction of held-out pairs where it is > 0
  double drawn_margin_positive = 0.0;  // same, for a single seeded draw per pair
  double topic_recovery = 0.0;     // fraction of held-out docs with >= 2 topics extracted
  double mean_topics_recovered = 0.0;
  double seconds = 0.0;

  std::string ToJson() const;
};

// Generates the corpus, trains from scratch, then scores the held-out pairs
// without dropout: contrastive margins and greedy extraction of `l` sentences.
SyntheticResult RunSynthetic(const SyntheticConfig& config);

// RunSynthetic once per alpha, everything else fixed.
std::vector<SyntheticResult> RunAblation(const SyntheticConfig& base,
                                         std::span<const double> alphas);

// Markdown table, one row per result.
std::string AblationTable(std::span<const SyntheticResult> results);

}  // namespace channelsum
