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

// Greedy extraction: grow the summary one document sentence at a time,
// always adding the unselected sentence that maximizes log P(D | S* + {d}).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "channelsum/corpus.hpp"
#include "channelsum/model.hpp"
#include "channelsum/tensor.hpp"

namespace channelsum {

struct ExtractConfig {
  std::size_t l = 3;

  // Throws kInvalidArgument when l == 0.
  void Validate() const;
};

// Scores candidate summaries of one fixed document, given as document
// indices. Implementations must not depend on the order of `selected`.
class SelectionScorer {
 public:
  virtual ~SelectionScorer() = default;
  virtual std::size_t num_sentences() const = 0;
  virtual double LogScore(std::span<const std::size_t> selected) = 0;
};

// Returns min(l, n) distinct indices in selection order. Ties go to the
// smallest index. Throws kEmptyInput when the scorer has no sentences.
std::vector<std::size_t> GreedySelect(SelectionScorer& scorer, std::size_t l);

// GreedySelect with config.l, returned in document order.
std::vector<std::size_t> SelectInDocumentOrder(SelectionScorer& scorer,
                                               const ExtractConfig& config);

// log P(D|S) from the channel model. Document sentences are encoded once.
class ChannelScorer : public SelectionScorer {
 public:
  ChannelScorer(const Document& doc, const ModelParams& params);
  std::size_t num_sentences() const override { return n_; }
  double LogScore(std::span<const std::size_t> selected) override;

 private:
  const ModelParams& params_;
  std::size_t n_ = 0;
  ad::Tensor doc_vecs_;
  std::vector<ad::Tensor> rows_;
};

// Selected sentences in document order with provenance kExtracted.
SummaryCandidate Extract(const Document& doc, const ModelParams& params,
                         const ExtractConfig& config);
// Index form of Extract, sorted ascending.
std::vector<std::size_t> ExtractIndices(const Document& doc, const ModelParams& params,
                                        const ExtractConfig& config);

struct BatchStats {
  std::size_t ok = 0;
  std::size_t failed = 0;
};

// Reads corpus records from `in`, writes one record per extracted document to
// `out`: the input id and document, with "summary" replaced by the raw text
// of the extracted sentences. Records that fail (malformed line, nothing left
// after preprocessing) are logged and skipped. Output order follows input
// order regardless of `workers`.
BatchStats ExtractBatch(const std::filesystem::path& in, std::ostream& out,
                        const ModelParams& params, const Vocabulary& vocab,
                        const ExtractConfig& config, std::size_t workers = 1);

}  // namespace channelsum
