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

#include "channelsum/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include <json.hpp>

#include "channelsum/contrastive.hpp"
#include "channelsum/error.hpp"
#include "channelsum/extractor.hpp"
#include "channelsum/logging.hpp"
#include "channelsum/trainer.hpp"

#include <fmt/format.h>

namespace channelsum {
namespace {

constexpr std::uint32_t kHeldoutTag = 0x484fu;

std::vector<std::size_t> SampleDistinct(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(k);
  return all;
}

std::string Word(std::size_t i) { return "w" + std::to_string(i); }

RawPair MakePair(const SyntheticConfig& c, const std::string& id, std::mt19937_64& rng,
                 std::vector<std::size_t>* topic_positions) {
  // Planted sentence k draws its topic words from its own group.
  const auto topics =
      SampleDistinct(c.topic_words, c.topic_sentences * c.words_per_topic, rng);
  auto positions = SampleDistinct(c.doc_sentences, c.topic_sentences, rng);
  std::sort(positions.begin(), positions.end());

  std::uniform_int_distribution<std::size_t> length(c.min_tokens, c.max_tokens);
  std::uniform_int_distribution<std::size_t> group_pick(0, c.topic_sentences - 1);
  std::uniform_int_distribution<std::size_t> in_group(0, c.words_per_topic - 1);
  std::uniform_int_distribution<std::size_t> filler_pick(c.topic_words, c.vocab_words - 1);
  std::bernoulli_distribution mostly(0.8);
  std::bernoulli_distribution sometimes(0.5);
  auto topic_word = [&](std::size_t group) {
    return Word(topics[group * c.words_per_topic + in_group(rng)]);
  };

  RawPair pair;
  pair.id = id;
  for (std::size_t s = 0, next_topic = 0; s < c.doc_sentences; ++s) {
    const bool is_topic = next_topic < positions.size() && positions[next_topic] == s;
    std::vector<std::string> words(length(rng));
    for (auto& w : words) {
      w = is_topic && mostly(rng) ? topic_word(next_topic) : Word(filler_pick(rng));
    }
    if (!is_topic && sometimes(rng)) {
      std::uniform_int_distribution<std::size_t> slot(0, words.size() - 1);
      words[slot(rng)] = topic_word(group_pick(rng));
    }
    std::string text;
    for (const auto& w : words) text += w + " ";
    text += ".";
    pair.document.push_back(text);
    if (is_topic) {
      pair.summary.push_back(text);
      ++next_topic;
    }
  }
  if (topic_positions) *topic_positions = positions;
  return pair;
}

}  // namespace

void SyntheticConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (doc_sentences < 2) fail("doc_sentences must be >= 2");
  if (topic_sentences == 0 || topic_sentences > doc_sentences) {
    fail("topic_sentences must be in [1, doc_sentences]");
  }
  if (topic_words == 0 || topic_words >= vocab_words) fail("need 0 < topic_words < vocab_words");
  if (words_per_topic == 0 || topic_sentences * words_per_topic > topic_words) {
    fail("need 1 <= words_per_topic and topic_sentences * words_per_topic <= topic_words");
  }
  if (min_tokens < 4 || max_tokens < min_tokens) fail("need 4 <= min_tokens <= max_tokens");
  if (train_pairs == 0 || heldout_pairs == 0) fail("train_pairs and heldout_pairs must be >= 1");
  if (l == 0) fail("l must be >= 1");
}

std::string SyntheticConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["train_pairs"] = train_pairs;
  j["heldout_pairs"] = heldout_pairs;
  j["doc_sentences"] = doc_sentences;
  j["topic_sentences"] = topic_sentences;
  j["vocab_words"] = vocab_words;
  j["topic_words"] = topic_words;
  j["words_per_topic"] = words_per_topic;
  j["min_tokens"] = min_tokens;
  j["max_tokens"] = max_tokens;
  j["hidden"] = hidden;
  j["emb_dim"] = emb_dim;
  j["epochs"] = epochs;
  j["lr"] = lr;
  j["alpha"] = alpha;
  j["dropout"] = dropout;
  j["l"] = l;
  return j.dump();
}

std::string SyntheticResult::ToJson() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["epochs"] = epochs;
  j["final_epoch_loss"] = final_epoch_loss;
  j["mean_margin"] = mean_margin;
  j["margin_positive"] = margin_positive;
  j["drawn_margin_positive"] = drawn_margin_positive;
  j["topic_recovery"] = topic_recovery;
  j["mean_topics_recovered"] = mean_topics_recovered;
  j["seconds"] = seconds;
  return j.dump();
}

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  SyntheticCorpus out;
  for (std::size_t i = 0; i < config.train_pairs; ++i) {
    out.train.push_back(MakePair(config, "train-" + std::to_string(i), rng, nullptr));
  }
  for (std::size_t i = 0; i < config.heldout_pairs; ++i) {
    std::vector<std::size_t> topics;
    out.heldout.push_back(MakePair(config, "heldout-" + std::to_string(i), rng, &topics));
    out.heldout_topics.push_back(std::move(topics));
  }
  return out;
}

SyntheticResult RunSynthetic(const SyntheticConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const SyntheticCorpus corpus = GenerateSynthetic(config);
  const Vocabulary vocab = BuildVocabulary(corpus.train);
  const EmbeddingTable embeddings = RandomEmbeddings(vocab, config.emb_dim, config.seed);

  TrainConfig tc;
  tc.lr = config.lr;
  tc.alpha = config.alpha;
  tc.dropout = config.dropout;
  tc.epochs = config.epochs;
  tc.seed = config.seed;
  tc.hidden = config.hidden;
  tc.emb_dim = config.emb_dim;
  tc.log_every = 0;
  Checkpoint ckpt = InitCheckpoint(vocab, embeddings, tc);
  const auto train = PrepareExamples(corpus.train, vocab);

  double epoch_loss = 0.0;
  std::size_t epoch_steps = 0;
  std::uint64_t current_epoch = 0;
  Train(train, ckpt, tc, [&](const StepRecord& r) {
    if (r.epoch != current_epoch) {
      current_epoch = r.epoch;
      epoch_loss = 0.0;
      epoch_steps = 0;
    }
    epoch_loss += r.loss.total;
    ++epoch_steps;
  });

  SyntheticResult result;
  result.alpha = config.alpha;
  result.epochs = config.epochs;
  result.final_epoch_loss = epoch_steps ? epoch_loss / static_cast<double>(epoch_steps) : 0.0;

  const auto heldout = PrepareExamples(corpus.heldout, vocab);
  if (heldout.size() != corpus.heldout.size()) {
    throw Error(ErrorCode::kInternal, "synthetic held-out pair lost in preprocessing");
  }
  std::size_t positive = 0, drawn_positive = 0, recovered = 0, topics_hit = 0;
  double margin_sum = 0.0;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    const TrainingExample& ex = heldout[i];
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(i),
                      kHeldoutTag};
    std::mt19937_64 rng(seq);
    const ContrastivePair drawn = MakeContrastive(ex.doc, ex.gold, rng);
    double drawn_margin = 0.0, expected = 0.0;
    {
      ad::NoGradGuard no_grad;
      auto margin_of = [&](const ContrastivePair& pair) {
        return ContrastiveLoss(pair, ckpt.params, config.alpha, ForwardMode::Inference())
            .values.margin;
      };
      drawn_margin = margin_of(drawn);
      // Average over every (j', i2) the construction can draw, each equally likely.
      for (std::size_t j = 0; j < ex.gold.size(); ++j) {
        const std::size_t i1 = BestRougeMatch(ex.doc, ex.gold[j]);
        double sum = 0.0;
        for (std::size_t i2 = 0; i2 < ex.doc.size(); ++i2) {
          if (i2 != i1) sum += margin_of(MakeContrastiveAt(ex.doc, ex.gold, j, i2));
        }
        expected += sum / static_cast<double>(ex.doc.size() - 1);
      }
      expected /= static_cast<double>(ex.gold.size());
    }
    Log().debug("{}: planted={} drawn j'={} i2={} margin={:.4f} mean margin={:.4f}", ex.id,
                fmt::join(corpus.heldout_topics[i], ","), drawn.j_prime, drawn.i2, drawn_margin,
                expected);
    margin_sum += expected;
    if (expected > 0.0) ++positive;
    if (drawn_margin > 0.0) ++drawn_positive;

    ExtractConfig ec;
    ec.l = config.l;
    const auto picked = ExtractIndices(heldout[i].doc, ckpt.params, ec);
    const auto& planted = corpus.heldout_topics[i];
    std::size_t hits = 0;
    for (const std::size_t p : picked) {
      hits += std::count(planted.begin(), planted.end(), p) ? 1 : 0;
    }
    topics_hit += hits;
    if (hits >= std::min<std::size_t>(2, planted.size())) ++recovered;
  }
  const double n = static_cast<double>(heldout.size());
  result.mean_margin = margin_sum / n;
  result.margin_positive = static_cast<double>(positive) / n;
  result.drawn_margin_positive = static_cast<double>(drawn_positive) / n;
  result.topic_recovery = static_cast<double>(recovered) / n;
  result.mean_topics_recovered = static_cast<double>(topics_hit) / n;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Log().info("synthetic alpha={} margin>0 {:.2f} recovery {:.2f} ({:.1f}s)", config.alpha,
             result.margin_positive, result.topic_recovery, result.seconds);
  return result;
}

std::vector<SyntheticResult> RunAblation(const SyntheticConfig& base,
                                         std::span<const double> alphas) {
  std::vector<SyntheticResult> out;
  for (const double a : alphas) {
    SyntheticConfig c = base;
    c.alpha = a;
    out.push_back(RunSynthetic(c));
  }
  return out;
}

std::string AblationTable(std::span<const SyntheticResult> results) {
  std::string out =
      "| alpha | epochs | final epoch loss | mean margin | mean margin > 0 | drawn margin > 0 | "
      "topic recovery | topics / doc | seconds |\n"
      "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : results) {
    out += fmt::format("| {:g} | {} | {:.4f} | {:.4f} | {:.2f} | {:.2f} | {:.2f} | {:.2f} | {:.1f} |\n",
                       r.alpha, r.epochs, r.final_epoch_loss, r.mean_margin, r.margin_positive,
                       r.drawn_margin_positive, r.topic_recovery, r.mean_topics_recovered,
                       r.seconds);
  }
  return out;
}

}  // namespace channelsum
