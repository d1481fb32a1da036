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

#include "channelsum/contrastive.hpp"

#include <map>

#include <json.hpp>

#include "channelsum/error.hpp"
#include "channelsum/rouge.hpp"

namespace channelsum {

using ad::Tensor;

std::size_t BestRougeMatch(const Document& doc, const Sentence& target) {
  std::size_t best = 0;
  double best_f1 = -1.0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const double f1 = RougeN<TokenId>(doc[i].tokens, target.tokens, 1).f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = i;
    }
  }
  return best;
}

ContrastivePair MakeContrastive(const Document& doc, const SummaryCandidate& gold,
                                std::mt19937_64& rng) {
  if (gold.size() == 0) throw Error(ErrorCode::kEmptyInput, "gold summary is empty");
  if (doc.size() < 2) {
    throw Error(ErrorCode::kTooShortDocument,
                "contrastive pairs need at least 2 document sentences, got " +
                    std::to_string(doc.size()));
  }
  const std::size_t j_prime =
      std::uniform_int_distribution<std::size_t>(0, gold.size() - 1)(rng);
  const std::size_t i1 = BestRougeMatch(doc, gold[j_prime]);
  // Uniform over the |D| - 1 positions other than i1.
  const std::size_t draw = std::uniform_int_distribution<std::size_t>(0, doc.size() - 2)(rng);
  return MakeContrastiveAt(doc, gold, j_prime, draw >= i1 ? draw + 1 : draw);
}

ContrastivePair MakeContrastiveAt(const Document& doc, const SummaryCandidate& gold,
                                  std::size_t j_prime, std::size_t i2) {
  if (gold.size() == 0) throw Error(ErrorCode::kEmptyInput, "gold summary is empty");
  if (doc.size() < 2) {
    throw Error(ErrorCode::kTooShortDocument,
                "contrastive pairs need at least 2 document sentences, got " +
                    std::to_string(doc.size()));
  }
  if (j_prime >= gold.size() || i2 >= doc.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "contrastive positions out of range: j'=" + std::to_string(j_prime) +
                    " i2=" + std::to_string(i2));
  }
  ContrastivePair pair;
  pair.j_prime = j_prime;
  pair.i1 = BestRougeMatch(doc, gold[j_prime]);
  pair.i2 = i2;
  if (i2 == pair.i1) {
    throw Error(ErrorCode::kInvalidArgument, "i2 equals the best match i1");
  }
  pair.doc = doc;
  pair.s1 = gold;
  pair.s1.provenance = Provenance::kConstructed;
  pair.s1.sentences[pair.j_prime] = doc[pair.i1];
  pair.s2 = gold;
  pair.s2.provenance = Provenance::kConstructed;
  pair.s2.sentences[pair.j_prime] = doc[pair.i2];
  return pair;
}

LossGraph ContrastiveLoss(const ContrastivePair& pair, const ModelParams& params,
                          double alpha, const ForwardMode& mode) {
  if (pair.doc.size() == 0 || pair.s1.size() == 0 || pair.s2.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "contrastive loss needs non-empty inputs");
  }
  std::map<std::vector<TokenId>, Tensor> cache;
  auto encode = [&](const Sentence& s) {
    auto it = cache.find(s.tokens);
    if (it == cache.end()) {
      it = cache.emplace(s.tokens,
                         EncodeSentence(s.tokens, params.embedding, params.gru, mode))
               .first;
    }
    return it->second;
  };
  auto stack = [&](const std::vector<Sentence>& sentences) {
    std::vector<Tensor> rows;
    rows.reserve(sentences.size());
    for (const auto& s : sentences) rows.push_back(encode(s));
    return ad::StackRows(rows);
  };
  const Tensor doc_vecs = stack(pair.doc.sentences);
  const SalienceGraph pos = SalienceFromVectors(doc_vecs, stack(pair.s1.sentences),
                                                params.mlp, mode);
  const SalienceGraph neg = SalienceFromVectors(doc_vecs, stack(pair.s2.sentences),
                                                params.mlp, mode);
  const Tensor con = ad::Scale(ad::Sub(pos.log_p, neg.log_p), -1.0);
  const Tensor penal = Penalization(pos.attention);

  LossGraph out;
  out.total = ad::Add(con, ad::Scale(penal, alpha));
  out.values.con = con.item();
  out.values.penal = penal.item();
  out.values.margin = pos.log_p.item() - neg.log_p.item();
  out.values.total = out.total.item();
  return out;
}

std::string ContrastiveToJson(const std::string& id, const ContrastivePair& pair,
                              const SummaryCandidate& gold) {
  auto raw = [](const auto& sentences) {
    std::vector<std::string> out;
    for (const auto& s : sentences) out.push_back(s.raw);
    return out;
  };
  nlohmann::ordered_json j;
  j["id"] = id;
  j["document"] = raw(pair.doc.sentences);
  j["summary"] = raw(gold.sentences);
  j["s1"] = raw(pair.s1.sentences);
  j["s2"] = raw(pair.s2.sentences);
  j["j_prime"] = pair.j_prime;
  j["i1"] = pair.i1;
  j["i2"] = pair.i2;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace channelsum
