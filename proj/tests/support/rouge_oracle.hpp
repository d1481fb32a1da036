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


// Reference ROUGE computations written without sharing code with the
// library: n-grams counted in a hash map keyed by their text, and LCS by the
// full quadratic table.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace channelsum::testing {

struct OracleScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline OracleScore OracleFromCounts(double hits, double cand, double ref) {
  OracleScore s;
  if (cand > 0) s.precision = hits / cand;
  if (ref > 0) s.recall = hits / ref;
  if (s.precision + s.recall > 0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

inline std::unordered_map<std::string, int> CountNgrams(const std::vector<int>& seq,
                                                        std::size_t n) {
  std::unordered_map<std::string, int> counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) key += std::to_string(seq[i + k]) + "|";
    ++counts[key];
  }
  return counts;
}

inline OracleScore OracleRougeN(const std::vector<int>& cand, const std::vector<int>& ref,
                                std::size_t n) {
  const auto c = CountNgrams(cand, n);
  const auto r = CountNgrams(ref, n);
  double hits = 0.0, total_c = 0.0, total_r = 0.0;
  for (const auto& [gram, k] : c) {
    total_c += k;
    const auto it = r.find(gram);
    if (it != r.end()) hits += std::min(k, it->second);
  }
  for (const auto& [gram, k] : r) total_r += k;
  return OracleFromCounts(hits, total_c, total_r);
}

inline std::size_t OracleLcs(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

// Token list of length 0..max_len over a vocabulary of `vocab` symbols.
inline std::vector<int> RandomTokenList(std::mt19937_64& rng, int vocab, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), sym(0, vocab - 1);
  std::vector<int> out(static_cast<std::size_t>(len(rng)));
  for (auto& x : out) x = sym(rng);
  return out;
}

}  // namespace channelsum::testing
