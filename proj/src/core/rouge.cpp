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

#include "channelsum/rouge.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "channelsum/error.hpp"
#include "channelsum/text.hpp"

namespace channelsum {
namespace {

double Round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string ListIds(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > shown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

}  // namespace

std::vector<std::string> RougeTokens(std::string_view text) {
  return Tokenize(ToLowerAscii(text));
}

std::string EvalMode::Name() const {
  if (kind == Kind::kFullF1) return "full-f1";
  return "limited-recall-" + std::to_string(byte_budget);
}

std::string RougeReport::ToJson() const {
  // Fixed two decimals rather than shortest round-trip.
  std::string out = "{";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "\"rouge1\": %.2f, \"rouge2\": %.2f, \"rougeL\": %.2f",
                Round2(rouge1), Round2(rouge2), Round2(rougeL));
  out += buf;
  out += ", \"mode\": " + nlohmann::json(mode.Name()).dump();
  out += ", \"n\": " + std::to_string(n) + "}";
  return out;
}

std::string JoinSentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

PairScores ScorePair(std::string_view candidate, std::string_view reference,
                     const EvalMode& mode) {
  if (mode.kind == EvalMode::Kind::kLimitedRecall) {
    candidate = TruncateUtf8(candidate, mode.byte_budget);
  }
  const auto c = RougeTokens(candidate);
  const auto r = RougeTokens(reference);
  std::span<const std::string> cs(c), rs(r);
  return {RougeN(cs, rs, 1), RougeN(cs, rs, 2), RougeL(cs, rs)};
}

RougeReport EvaluateCorpus(std::span<const RawPair> hypotheses,
                           std::span<const RawPair> references, const EvalMode& mode) {
  if (mode.kind == EvalMode::Kind::kLimitedRecall && mode.byte_budget == 0) {
    throw Error(ErrorCode::kInvalidArgument, "byte budget must be positive");
  }
  std::unordered_map<std::string, std::vector<const RawPair*>> refs_by_id;
  for (const auto& r : references) refs_by_id[r.id].push_back(&r);

  std::set<std::string> hyp_ids;
  std::vector<std::string> missing;
  for (const auto& h : hypotheses) {
    if (!hyp_ids.insert(h.id).second) {
      throw Error(ErrorCode::kIdMismatch, "duplicate hypothesis id: " + h.id);
    }
    if (!refs_by_id.count(h.id)) missing.push_back(h.id);
  }
  std::vector<std::string> unmatched_refs;
  for (const auto& [id, _] : refs_by_id) {
    if (!hyp_ids.count(id)) unmatched_refs.push_back(id);
  }
  if (!missing.empty() || !unmatched_refs.empty()) {
    std::sort(unmatched_refs.begin(), unmatched_refs.end());
    std::string msg = "unmatched ids;";
    if (!missing.empty()) msg += " hypotheses without reference: " + ListIds(missing) + ";";
    if (!unmatched_refs.empty()) {
      msg += " references without hypothesis: " + ListIds(unmatched_refs);
    }
    throw Error(ErrorCode::kIdMismatch, msg);
  }

  const bool full = mode.kind == EvalMode::Kind::kFullF1;
  auto pick = [full](const RougeScore& s) { return full ? s.f1 : s.recall; };
  RougeReport report;
  report.mode = mode;
  for (const auto& h : hypotheses) {
    const std::string candidate = JoinSentences(h.summary);
    double best1 = 0.0, best2 = 0.0, bestl = 0.0;
    for (const RawPair* ref : refs_by_id.at(h.id)) {
      const PairScores s = ScorePair(candidate, JoinSentences(ref->summary), mode);
      best1 = std::max(best1, pick(s.r1));
      best2 = std::max(best2, pick(s.r2));
      bestl = std::max(bestl, pick(s.rl));
    }
    report.rouge1 += best1;
    report.rouge2 += best2;
    report.rougeL += bestl;
  }
  report.n = hypotheses.size();
  if (report.n > 0) {
    const double scale = 100.0 / static_cast<double>(report.n);
    report.rouge1 *= scale;
    report.rouge2 *= scale;
    report.rougeL *= scale;
  }
  return report;
}

}  // namespace channelsum
