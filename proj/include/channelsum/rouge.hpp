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

// ROUGE-N and ROUGE-L over token sequences, plus corpus-level evaluation.
//
// No stemming and no stopword removal. Text is lowercased and split with the
// corpus tokenizer before scoring.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "channelsum/corpus.hpp"

namespace channelsum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline RougeScore MakeRougeScore(double matches, double cand_total, double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0 ? matches / cand_total : 0.0;
  s.recall = ref_total > 0 ? matches / ref_total : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

// Clipped n-gram overlap. N-grams are counted with multiplicity; each match is
// clipped to the reference multiplicity.
template <typename T>
RougeScore RougeN(std::span<const T> candidate, std::span<const T> reference,
                  std::size_t n) {
  if (n == 0 || candidate.size() < n || reference.size() < n) return {};
  auto grams = [n](std::span<const T> seq) {
    std::vector<std::span<const T>> out;
    out.reserve(seq.size() - n + 1);
    for (std::size_t i = 0; i + n <= seq.size(); ++i) out.push_back(seq.subspan(i, n));
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return out;
  };
  const auto c = grams(candidate);
  const auto r = grams(reference);
  // Walking two sorted multisets counts sum_g min(count_c(g), count_r(g)).
  std::size_t matches = 0;
  for (std::size_t i = 0, j = 0; i < c.size() && j < r.size();) {
    if (std::lexicographical_compare(c[i].begin(), c[i].end(), r[j].begin(), r[j].end())) {
      ++i;
    } else if (std::lexicographical_compare(r[j].begin(), r[j].end(), c[i].begin(),
                                            c[i].end())) {
      ++j;
    } else {
      ++matches, ++i, ++j;
    }
  }
  return MakeRougeScore(static_cast<double>(matches), static_cast<double>(c.size()),
                        static_cast<double>(r.size()));
}

// Length of the longest common subsequence, bit-parallel over the reference.
template <typename T>
std::size_t LcsLength(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t m = b.size();
  const std::size_t words = (m + 63) / 64;
  std::map<T, std::vector<std::uint64_t>> match;
  for (std::size_t j = 0; j < m; ++j) {
    auto& mask = match[b[j]];
    if (mask.empty()) mask.assign(words, 0);
    mask[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  std::vector<std::uint64_t> u(words);
  for (const T& symbol : a) {
    auto it = match.find(symbol);
    if (it == match.end()) continue;
    const auto& mask = it->second;
    for (std::size_t w = 0; w < words; ++w) u[w] = v[w] & mask[w];
    // v = (v + u) | (v - u), multi-word with carry and borrow.
    std::uint64_t carry = 0, borrow = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t sum1 = v[w] + u[w];
      const std::uint64_t c1 = sum1 < v[w];
      const std::uint64_t sum = sum1 + carry;
      const std::uint64_t c2 = sum < sum1;
      const std::uint64_t diff1 = v[w] - u[w];
      const std::uint64_t b1 = v[w] < u[w];
      const std::uint64_t diff = diff1 - borrow;
      const std::uint64_t b2 = diff1 < borrow;
      v[w] = sum | diff;
      carry = c1 | c2;
      borrow = b1 | b2;
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = ~v[w];
    if (w + 1 == words && m % 64 != 0) word &= (std::uint64_t{1} << (m % 64)) - 1;
    zeros += static_cast<std::size_t>(std::popcount(word));
  }
  return zeros;
}

template <typename T>
RougeScore RougeL(std::span<const T> candidate, std::span<const T> reference) {
  const std::size_t lcs = LcsLength(candidate, reference);
  return MakeRougeScore(static_cast<double>(lcs), static_cast<double>(candidate.size()),
                        static_cast<double>(reference.size()));
}

// Lowercased corpus tokenization.
std::vector<std::string> RougeTokens(std::string_view text);

struct EvalMode {
  enum class Kind { kFullF1, kLimitedRecall };
  Kind kind = Kind::kFullF1;
  std::size_t byte_budget = 75;  // kLimitedRecall only

  static EvalMode FullF1() { return {}; }
  static EvalMode LimitedRecall(std::size_t bytes) { return {Kind::kLimitedRecall, bytes}; }
  std::string Name() const;
};

struct RougeReport {
  double rouge1 = 0.0;  // mean x 100
  double rouge2 = 0.0;
  double rougeL = 0.0;
  EvalMode mode;
  std::size_t n = 0;

  // {"rouge1": x, "rouge2": y, "rougeL": z, "mode": ..., "n": count},
  // values rounded to 2 decimals.
  std::string ToJson() const;
};

// Scores a single candidate text against one reference text. Candidate
// truncation for limited-length mode happens here.
struct PairScores {
  RougeScore r1, r2, rl;
};
PairScores ScorePair(std::string_view candidate, std::string_view reference,
                     const EvalMode& mode);

// Every hypothesis id must appear in `references` and vice versa (throws
// kIdMismatch). A reference id may repeat; each metric then takes the max over
// that id's references.
RougeReport EvaluateCorpus(std::span<const RawPair> hypotheses,
                           std::span<const RawPair> references, const EvalMode& mode);

// Sentences joined with single spaces.
std::string JoinSentences(const std::vector<std::string>& sentences);

}  // namespace channelsum
