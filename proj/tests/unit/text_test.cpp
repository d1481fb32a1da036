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


#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "channelsum/text.hpp"

namespace channelsum {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, SplitsPunctuationFromWords) {
  EXPECT_EQ(Tokenize("Hello, world!"), (Tokens{"Hello", ",", "world", "!"}));
  EXPECT_EQ(Tokenize("(it's) \"ok\";"),
            (Tokens{"(", "it", "'", "s", ")", "\"", "ok", "\"", ";"}));
  EXPECT_EQ(Tokenize("  a\tb\n"), (Tokens{"a", "b"}));
  EXPECT_TRUE(Tokenize("").empty());
}

TEST(Tokenize, KeepsNumericSeparators) {
  EXPECT_EQ(Tokenize("cost 1,234.5 now."), (Tokens{"cost", "1,234.5", "now", "."}));
  EXPECT_EQ(Tokenize("ends in 3."), (Tokens{"ends", "in", "3", "."}));
}

TEST(IsNumberToken, AcceptsSignedGroupedDecimals) {
  for (const char* t : {"0", "250", "-3", "+7", "1,234", "1,234.5", "3.14"}) {
    EXPECT_TRUE(IsNumberToken(t)) << t;
  }
  for (const char* t : {"", "-", "1.", ",5", "1..2", "12a", "a12", "1-2"}) {
    EXPECT_FALSE(IsNumberToken(t)) << t;
  }
}

TEST(NormalizeSentence, LowercasesAndReplacesNumbers) {
  EXPECT_EQ(NormalizeSentence("He paid 250 dollars today."),
            (Tokens{"he", "paid", "<zero>", "dollars", "today", "."}));
}

TEST(NormalizeSentence, IdentityOnCleanText) {
  const Tokens clean{"the", "cat", "sat", "down"};
  EXPECT_EQ(NormalizeSentence(JoinTokens(clean)), clean);
}

TEST(NormalizeSentence, IsIdempotent) {
  for (const char* raw : {"He paid 250 dollars today.", "A (b) C, 1,000 -- e!", "x"}) {
    const Tokens once = NormalizeSentence(raw);
    EXPECT_EQ(NormalizeSentence(JoinTokens(once)), once) << raw;
  }
}

TEST(TruncateUtf8, RespectsCodePoints) {
  EXPECT_EQ(TruncateUtf8("abcdefgh", 4), "abcd");
  EXPECT_EQ(TruncateUtf8("abc", 10), "abc");
  // "é" is two bytes; cutting inside it drops the whole code point.
  EXPECT_EQ(TruncateUtf8("a\xC3\xA9z", 2), "a");
  EXPECT_EQ(TruncateUtf8("a\xC3\xA9z", 3), "a\xC3\xA9");
  EXPECT_EQ(TruncateUtf8("\xE2\x82\xAC", 2), "");
}

}  // namespace
}  // namespace channelsum
