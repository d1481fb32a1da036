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
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "channelsum/contrastive.hpp"
#include "channelsum/error.hpp"
#include "channelsum/synthetic.hpp"
#include "channelsum/trainer.hpp"
#include "support/test_support.hpp"

namespace channelsum {
namespace {

using testing::MakeSentence;

// Unigram F1 by counting, written independently of the ROUGE module.
double UnigramF1(const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
  std::map<TokenId, int> ca, cb;
  for (TokenId t : a) ++ca[t];
  for (TokenId t : b) ++cb[t];
  double hit = 0.0;
  for (auto [t, n] : ca) hit += std::min(n, cb.count(t) ? cb[t] : 0);
  if (hit == 0.0) return 0.0;
  const double p = hit / static_cast<double>(a.size()), r = hit / static_cast<double>(b.size());
  return 2.0 * p * r / (p + r);
}

bool SameTokens(const Sentence& a, const Sentence& b) { return a.tokens == b.tokens; }

TEST(MakeContrastive, InvariantsOverRandomDraws) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> nd(2, 8), ns(1, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Document doc = testing::RandomDocument(6, nd(rng), rng);
    SummaryCandidate gold = testing::RandomSummary(6, ns(rng), rng);
    const ContrastivePair pair = MakeContrastive(doc, gold, rng);

    ASSERT_EQ(pair.s1.size(), gold.size());
    ASSERT_EQ(pair.s2.size(), gold.size());
    ASSERT_NE(pair.i1, pair.i2);
    ASSERT_LT(pair.i2, doc.size());
    for (std::size_t j = 0; j < gold.size(); ++j) {
      if (j == pair.j_prime) continue;
      ASSERT_TRUE(SameTokens(pair.s1[j], gold[j]));
      ASSERT_TRUE(SameTokens(pair.s2[j], gold[j]));
    }
    ASSERT_TRUE(SameTokens(pair.s1[pair.j_prime], doc[pair.i1]));
    ASSERT_TRUE(SameTokens(pair.s2[pair.j_prime], doc[pair.i2]));
    EXPECT_EQ(pair.s1.provenance, Provenance::kConstructed);

    // i1 is the first maximizer of unigram F1 against gold[j'].
    const auto& target = gold[pair.j_prime].tokens;
    std::size_t best = 0;
    for (std::size_t i = 1; i < doc.size(); ++i) {
      if (UnigramF1(doc[i].tokens, target) > UnigramF1(doc[best].tokens, target)) best = i;
    }
    ASSERT_EQ(pair.i1, best) << "trial " << trial;
  }
}

TEST(MakeContrastive, Examples) {
  std::mt19937_64 rng(1);
  Document doc;
  doc.sentences = {MakeSentence({1, 2, 3}), MakeSentence({7, 8, 9, 10}), MakeSentence({4, 5})};
  SummaryCandidate gold;
  gold.sentences = {MakeSentence({7, 8, 9, 10})};
  for (int i = 0; i < 50; ++i) {
    const ContrastivePair pair = MakeContrastive(doc, gold, rng);
    EXPECT_EQ(pair.j_prime, 0u);
    EXPECT_EQ(pair.i1, 1u);
  }
}

TEST(MakeContrastive, TiedMaximaPickSmallestIndex) {
  // Unigram F1 against the target: 0.2, 0.8, 0.8, 0.1, 0.0.
  const Sentence target = MakeSentence({1, 2, 3, 4, 5});
  Document doc;
  doc.sentences = {
      MakeSentence({1, 20, 21, 22, 23}),
      MakeSentence({1, 2, 3, 4, 24}),
      MakeSentence({2, 3, 4, 5, 25}),
      MakeSentence({1, 30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43}),
      MakeSentence({50, 51}),
  };
  const std::vector<double> expected{0.2, 0.8, 0.8, 0.1, 0.0};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(UnigramF1(doc[i].tokens, target.tokens), expected[i], 1e-12);
  }
  EXPECT_EQ(BestRougeMatch(doc, target), 1u);
}

TEST(MakeContrastive, Errors) {
  std::mt19937_64 rng(1);
  Document one;
  one.sentences = {MakeSentence({1, 2})};
  SummaryCandidate gold;
  gold.sentences = {MakeSentence({1, 2})};
  try {
    MakeContrastive(one, gold, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShortDocument);
  }
  Document two;
  two.sentences = {MakeSentence({1, 2}), MakeSentence({3})};
  EXPECT_THROW(MakeContrastiveAt(two, gold, 1, 1), Error);
  EXPECT_THROW(MakeContrastiveAt(two, gold, 0, 0), Error);  // i2 == i1
  EXPECT_THROW(MakeContrastive(two, SummaryCandidate{}, rng), Error);
}

ContrastivePair FixedPair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Document doc = testing::RandomDocument(10, 4, rng);
  const SummaryCandidate gold = testing::RandomSummary(10, 2, rng);
  return MakeContrastive(doc, gold, rng);
}

TEST(ContrastiveLoss, MatchesPlainLoopOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelParams p = testing::TinyModel(10, 5, 4, seed);
    const ContrastivePair pair = FixedPair(seed);
    for (double alpha : {0.0, 0.001, 1.0}) {
      const LossGraph g = ContrastiveLoss(pair, p, alpha, ForwardMode::Inference());
      EXPECT_NEAR(g.values.total, testing::Plain{p}.Total(pair, alpha), 1e-6);
      EXPECT_NEAR(g.total.item(), g.values.total, 1e-12);
      EXPECT_NEAR(g.values.total, g.values.con + alpha * g.values.penal, 1e-6);
      EXPECT_EQ(g.values.con, -g.values.margin);
      if (alpha == 0.0) {
        EXPECT_EQ(g.values.total, g.values.con);
      }
    }
  }
}

TEST(ContrastiveLoss, DegenerateAndAntisymmetric) {
  const ModelParams p = testing::TinyModel(10, 5, 4, 3);
  ContrastivePair pair = FixedPair(3);
  ContrastivePair same = pair;
  same.s2 = same.s1;
  const LossBreakdown zero = ContrastiveLoss(same, p, 0.0, ForwardMode::Inference()).values;
  EXPECT_EQ(zero.margin, 0.0);
  EXPECT_EQ(zero.con, 0.0);

  const LossBreakdown a = ContrastiveLoss(pair, p, 0.0, ForwardMode::Inference()).values;
  std::swap(pair.s1, pair.s2);
  const LossBreakdown b = ContrastiveLoss(pair, p, 0.0, ForwardMode::Inference()).values;
  EXPECT_NEAR(a.con, -b.con, 1e-12);
}

TEST(ContrastiveLoss, JsonDump) {
  const ContrastivePair pair = FixedPair(1);
  SummaryCandidate gold;
  gold.sentences = pair.s1.sentences;
  const auto j = nlohmann::json::parse(ContrastiveToJson("id", pair, gold));
  EXPECT_EQ(j["i1"], pair.i1);
  EXPECT_EQ(j["i2"], pair.i2);
  EXPECT_EQ(j["j_prime"], pair.j_prime);
  EXPECT_EQ(j["s2"].size(), pair.s2.size());
}

TEST(ContrastiveLoss, DecreasesDuringTraining) {
  SyntheticConfig sc;
  sc.train_pairs = 20;
  sc.heldout_pairs = 1;
  const SyntheticCorpus corpus = GenerateSynthetic(sc);
  const Vocabulary vocab = BuildVocabulary(corpus.train);
  TrainConfig tc;
  tc.hidden = 16;
  tc.emb_dim = 16;
  tc.lr = 1e-3;
  tc.epochs = 10;  // 200 steps
  tc.seed = 5;
  tc.log_every = 0;
  Checkpoint ckpt = InitCheckpoint(vocab, RandomEmbeddings(vocab, 16, 5), tc);
  const auto examples = PrepareExamples(corpus.train, vocab);
  std::vector<double> first, last;
  Train(examples, ckpt, tc, [&](const StepRecord& r) {
    if (r.epoch == 0) first.push_back(r.loss.con);
    if (r.epoch == 9) last.push_back(r.loss.con);
  });
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  ASSERT_EQ(first.size(), 20u);
  EXPECT_LT(mean(last), mean(first));
}

}  // namespace
}  // namespace channelsum
