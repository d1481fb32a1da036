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

#pragma once

#include <random>
#include <string>

#include "channelsum/channel.hpp"
#include "channelsum/corpus.hpp"
#include "channelsum/model.hpp"

namespace channelsum {

// A positive/negative candidate pair built from a gold summary. Both
// candidates equal the gold summary except at position j_prime, which holds
// doc[i1] in s1 and doc[i2] in s2.
struct ContrastivePair {
  Document doc;
  SummaryCandidate s1;  // positive
  SummaryCandidate s2;  // negative
  std::size_t j_prime = 0;
  std::size_t i1 = 0;  // ROUGE-1 F1 best match for gold[j_prime]
  std::size_t i2 = 0;  // uniform over document positions other than i1
};

// Index of the document sentence with the highest ROUGE-1 F1 against
// `target`; ties go to the smallest index.
std::size_t BestRougeMatch(const Document& doc, const Sentence& target);

// Draws j' uniformly, picks i1 by ROUGE-1 F1 and i2 uniformly among the
// remaining document positions. Throws kTooShortDocument when |doc| < 2 and
// kEmptyInput when the gold summary is empty.
ContrastivePair MakeContrastive(const Document& doc, const SummaryCandidate& gold,
                                std::mt19937_64& rng);

// The pair MakeContrastive builds once it has drawn j_prime and i2. Throws
// kInvalidArgument when a position is out of range or i2 == i1.
ContrastivePair MakeContrastiveAt(const Document& doc, const SummaryCandidate& gold,
                                  std::size_t j_prime, std::size_t i2);

struct LossBreakdown {
  double total = 0.0;
  double con = 0.0;
  double penal = 0.0;
  double margin = 0.0;  // log P(D|S1) - log P(D|S2)
};

struct LossGraph {
  ad::Tensor total;
  LossBreakdown values;
};

// total = -(log P(D|S1) - log P(D|S2)) + alpha * penalty(A(D, S1)).
// Each distinct sentence (by token ids) is encoded once per call, so a
// sentence shared by the document and both candidates uses one dropout mask.
LossGraph ContrastiveLoss(const ContrastivePair& pair, const ModelParams& params,
                          double alpha, const ForwardMode& mode);

// Debug record: corpus fields plus "s1", "s2", "j_prime", "i1", "i2".
std::string ContrastiveToJson(const std::string& id, const ContrastivePair& pair,
                              const SummaryCandidate& gold);

}  // namespace channelsum
