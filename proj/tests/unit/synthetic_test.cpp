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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "channelsum/error.hpp"
#include "channelsum/synthetic.hpp"
#include "channelsum/text.hpp"

namespace channelsum {
namespace {

TEST(Synthetic, GeneratorShape) {
  SyntheticConfig c;
  const SyntheticCorpus a = GenerateSynthetic(c);
  const SyntheticCorpus b = GenerateSynthetic(c);
  EXPECT_EQ(a.train, b.train);
  ASSERT_EQ(a.train.size(), 200u);
  ASSERT_EQ(a.heldout.size(), 50u);
  ASSERT_EQ(a.heldout_topics.size(), 50u);
  for (std::size_t i = 0; i < a.heldout.size(); ++i) {
    const RawPair& p = a.heldout[i];
    const auto& topics = a.heldout_topics[i];
    ASSERT_EQ(p.document.size(), 8u);
    ASSERT_EQ(topics.size(), 3u);
    EXPECT_TRUE(std::is_sorted(topics.begin(), topics.end()));
    ASSERT_EQ(p.summary.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(p.summary[k], p.document[topics[k]]);
    for (const auto& s : p.document) {
      const auto tokens = Tokenize(s);
      EXPECT_GE(tokens.size(), c.min_tokens + 1);
      EXPECT_LE(tokens.size(), c.max_tokens + 1);
    }
  }
  SyntheticConfig other = c;
  other.seed = 2;
  EXPECT_NE(GenerateSynthetic(other).train, a.train);
}

TEST(Synthetic, ConfigValidation) {
  SyntheticConfig c;
  c.topic_sentences = 9;
  EXPECT_THROW(c.Validate(), Error);
  SyntheticConfig words;
  words.words_per_topic = 20;
  EXPECT_THROW(words.Validate(), Error);
  SyntheticConfig tokens;
  tokens.min_tokens = 3;
  EXPECT_THROW(tokens.Validate(), Error);
}

TEST(Synthetic, SmallRunAndTable) {
  SyntheticConfig c;
  c.train_pairs = 20;
  c.heldout_pairs = 5;
  c.hidden = 8;
  c.emb_dim = 8;
  c.epochs = 1;
  const double alphas[] = {0.0, 0.1};
  const auto results = RunAblation(c, alphas);
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) {
    EXPECT_EQ(r.epochs, 1u);
    EXPECT_GE(r.margin_positive, 0.0);
    EXPECT_LE(r.margin_positive, 1.0);
    EXPECT_GE(r.topic_recovery, 0.0);
    EXPECT_LE(r.topic_recovery, 1.0);
    EXPECT_LE(r.mean_topics_recovered, 3.0);
  }
  EXPECT_EQ(results[0].alpha, 0.0);
  const std::string table = AblationTable(results);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_NE(table.find("| 0.1 |"), std::string::npos) << table;
}

}  // namespace
}  // namespace channelsum
