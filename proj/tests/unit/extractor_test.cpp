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


#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "channelsum/channel.hpp"
#include "channelsum/error.hpp"
#include "channelsum/extractor.hpp"
#include "support/table_scorer.hpp"
#include "support/test_support.hpp"

namespace channelsum {
namespace {

using testing::StepwiseArgmax;
using testing::TableScorer;

TEST(GreedySelect, MatchesStepwiseArgmaxOnFourSentences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    TableScorer t(4, rng);
    EXPECT_EQ(GreedySelect(t, 2), StepwiseArgmax(t, 2));
  }
}

TEST(GreedySelect, RandomTrialsNoDuplicatesTiesToSmallest) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> n_dist(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = n_dist(rng);
    const std::size_t l = std::uniform_int_distribution<std::size_t>(1, n + 2)(rng);
    TableScorer t(n, rng, /*coarse=*/trial % 2 == 0);
    const auto picked = GreedySelect(t, l);
    ASSERT_EQ(picked, StepwiseArgmax(t, l));
    ASSERT_EQ(picked.size(), std::min(l, n));
    ASSERT_EQ(std::set<std::size_t>(picked.begin(), picked.end()).size(), picked.size());
  }
}

TEST(GreedySelect, SingleStepIsArgmaxOverSingletons) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    TableScorer t(6, rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < 6; ++i) {
      if (t.score(1u << i) > t.score(1u << best)) best = i;
    }
    EXPECT_EQ(GreedySelect(t, 1), std::vector<std::size_t>{best});
  }
}

TEST(GreedySelect, DocumentOrderIsSortedGreedySet) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    TableScorer t(7, rng, /*coarse=*/trial % 2 == 0);
    ExtractConfig config;
    config.l = 3;
    auto expected = StepwiseArgmax(t, 3);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(SelectInDocumentOrder(t, config), expected);
  }
}

TEST(GreedySelect, Errors) {
  std::mt19937_64 rng(1);
  TableScorer empty(0, rng);
  try {
    GreedySelect(empty, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  ExtractConfig bad;
  bad.l = 0;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(Extract, ChannelModelContract) {
  const ModelParams p = testing::TinyModel(12, 4, 6, 9);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const Document doc = testing::RandomDocument(12, n, rng);
    ExtractConfig cfg;
    cfg.l = 1 + trial % 4;
    const auto idx = ExtractIndices(doc, p, cfg);
    EXPECT_EQ(idx.size(), std::min(cfg.l, n));
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), idx.size());
    EXPECT_EQ(ExtractIndices(doc, p, cfg), idx);
    if (n <= cfg.l) {
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(idx[i], i);
    }
    const SummaryCandidate s = Extract(doc, p, cfg);
    EXPECT_EQ(s.provenance, Provenance::kExtracted);
    ASSERT_EQ(s.size(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_EQ(s[k].tokens, doc[idx[k]].tokens);
  }
}

TEST(Extract, ScorerAgreesWithSalience) {
  const ModelParams p = testing::TinyModel(12, 4, 6, 4);
  std::mt19937_64 rng(4);
  const Document doc = testing::RandomDocument(12, 5, rng);
  ChannelScorer scorer(doc, p);
  for (const std::vector<std::size_t>& subset :
       {std::vector<std::size_t>{2}, {0, 3}, {4, 1, 2}}) {
    SummaryCandidate s;
    for (std::size_t i : subset) s.sentences.push_back(doc[i]);
    EXPECT_NEAR(scorer.LogScore(subset), EvaluateSalience(doc, s, p).log_p, 1e-12);
  }
  // l = 1 picks the best singleton under the channel model.
  std::size_t best = 0;
  double best_score = -1e300;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    SummaryCandidate s;
    s.sentences = {doc[i]};
    const double v = EvaluateSalience(doc, s, p).log_p;
    if (v > best_score) {
      best = i;
      best_score = v;
    }
  }
  ExtractConfig one;
  one.l = 1;
  EXPECT_EQ(ExtractIndices(doc, p, one), std::vector<std::size_t>{best});
}

class ExtractBatchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    vocab_ = Vocabulary::FromTokens({"<unk>", "<zero>", "a", "b", "c", "d", "e", "."});
    params_ = testing::TinyModel(vocab_.size(), 4, 4, 1);
  }
  std::string Run(const std::string& content, std::size_t workers, BatchStats* stats) {
    const auto path = testing::TempPath("batch_" + std::to_string(workers) + ".jsonl");
    std::ofstream(path) << content;
    std::ostringstream out;
    *stats = ExtractBatch(path, out, params_, vocab_, ExtractConfig{2}, workers);
    return out.str();
  }
  Vocabulary vocab_;
  ModelParams params_;
};

TEST_F(ExtractBatchTest, EmptyCorpus) {
  BatchStats stats;
  EXPECT_EQ(Run("", 1, &stats), "");
  EXPECT_EQ(stats.ok, 0u);
  EXPECT_EQ(stats.failed, 0u);
}

TEST_F(ExtractBatchTest, PreservesIdsAndIsolatesFailures) {
  const std::string corpus =
      R"({"id":"one","document":["a b c d .","e d c b .","a a b b ."],"summary":["a b c d"]})" "\n"
      R"({"id":"bad","document":["too short"],"summary":["a b c d"]})" "\n"
      "not json\n"
      R"({"id":"two","document":["b c d e .","c d e a ."],"summary":["x y z w"]})" "\n";
  BatchStats stats;
  const std::string out = Run(corpus, 1, &stats);
  EXPECT_EQ(stats.ok, 2u);
  EXPECT_EQ(stats.failed, 2u);
  std::istringstream lines(out);
  std::string line;
  std::vector<RawPair> records;
  for (std::size_t n = 1; std::getline(lines, line); ++n) records.push_back(ParseRecord(line, n));
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].id, "one");
  EXPECT_EQ(records[0].summary.size(), 2u);
  EXPECT_EQ(records[1].id, "two");
  EXPECT_EQ(records[1].summary,
            (std::vector<std::string>{"b c d e .", "c d e a ."}));

  BatchStats parallel;
  EXPECT_EQ(Run(corpus, 4, &parallel), out);
  EXPECT_EQ(parallel.ok, 2u);
}

}  // namespace
}  // namespace channelsum
