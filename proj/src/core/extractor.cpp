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

#include "channelsum/extractor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "channelsum/channel.hpp"
#include "channelsum/encoder.hpp"
#include "channelsum/error.hpp"
#include "channelsum/logging.hpp"

namespace channelsum {

void ExtractConfig::Validate() const {
  if (l == 0) throw Error(ErrorCode::kInvalidArgument, "l must be >= 1");
}

std::vector<std::size_t> GreedySelect(SelectionScorer& scorer, std::size_t l) {
  const std::size_t n = scorer.num_sentences();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "empty document");
  const std::size_t target = std::min(l, n);

  std::vector<std::size_t> selected;
  std::vector<bool> taken(n, false);
  selected.reserve(target);
  while (selected.size() < target) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> trial = selected;
    trial.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      trial.back() = i;
      const double score = scorer.LogScore(trial);
      // Strict comparison keeps the earliest maximizer.
      if (best == n || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    taken[best] = true;
    selected.push_back(best);
  }
  return selected;
}

ChannelScorer::ChannelScorer(const Document& doc, const ModelParams& params)
    : params_(params), n_(doc.size()) {
  if (n_ == 0) throw Error(ErrorCode::kEmptyInput, "empty document");
  ad::NoGradGuard no_grad;
  const ForwardMode mode = ForwardMode::Inference();
  rows_.reserve(n_);
  for (const auto& s : doc.sentences) {
    rows_.push_back(EncodeSentence(s.tokens, params.embedding, params.gru, mode));
  }
  doc_vecs_ = ad::StackRows(rows_);
}

double ChannelScorer::LogScore(std::span<const std::size_t> selected) {
  ad::NoGradGuard no_grad;
  std::vector<ad::Tensor> summary;
  summary.reserve(selected.size());
  for (const std::size_t i : selected) summary.push_back(rows_.at(i));
  const SalienceGraph g = SalienceFromVectors(doc_vecs_, ad::StackRows(summary), params_.mlp,
                                              ForwardMode::Inference());
  return g.log_p.item();
}

std::vector<std::size_t> SelectInDocumentOrder(SelectionScorer& scorer,
                                               const ExtractConfig& config) {
  config.Validate();
  auto picked = GreedySelect(scorer, config.l);
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<std::size_t> ExtractIndices(const Document& doc, const ModelParams& params,
                                        const ExtractConfig& config) {
  config.Validate();
  ChannelScorer scorer(doc, params);
  return SelectInDocumentOrder(scorer, config);
}

SummaryCandidate Extract(const Document& doc, const ModelParams& params,
                         const ExtractConfig& config) {
  SummaryCandidate out;
  out.provenance = Provenance::kExtracted;
  for (const std::size_t i : ExtractIndices(doc, params, config)) {
    out.sentences.push_back(doc[i]);
  }
  return out;
}

namespace {

struct BatchItem {
  std::size_t line = 0;
  std::string text;
  std::optional<std::string> output;
};

std::optional<std::string> ExtractRecord(const BatchItem& item, const ModelParams& params,
                                         const Vocabulary& vocab, const ExtractConfig& config) {
  try {
    RawPair raw = ParseRecord(item.text, item.line);
    Document doc{PreprocessSentences(raw.document, vocab)};
    if (doc.size() == 0) {
      throw Error(ErrorCode::kEmptyAfterFilter,
                  "record " + raw.id + ": no document sentence has at least 4 tokens");
    }
    const SummaryCandidate summary = Extract(doc, params, config);
    raw.summary.clear();
    for (const auto& s : summary.sentences) raw.summary.push_back(s.raw);
    return RecordToJson(raw);
  } catch (const Error& e) {
    Log().warn("line {}: skipped: {}", item.line, e.what());
    return std::nullopt;
  }
}

}  // namespace

BatchStats ExtractBatch(const std::filesystem::path& in, std::ostream& out,
                        const ModelParams& params, const Vocabulary& vocab,
                        const ExtractConfig& config, std::size_t workers) {
  config.Validate();
  std::ifstream file(in);
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + in.string());
  workers = std::max<std::size_t>(workers, 1);
  const std::size_t chunk_size = 64 * workers;

  BatchStats stats;
  std::string line;
  std::size_t line_no = 0;
  bool eof = false;
  while (!eof) {
    std::vector<BatchItem> chunk;
    while (chunk.size() < chunk_size) {
      if (!std::getline(file, line)) {
        eof = true;
        break;
      }
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      chunk.push_back({line_no, line, std::nullopt});
    }
    if (workers == 1) {
      for (auto& item : chunk) item.output = ExtractRecord(item, params, vocab, config);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(workers);
      {
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
          threads.emplace_back([&, w] {
            try {
              for (std::size_t i = next++; i < chunk.size(); i = next++) {
                chunk[i].output = ExtractRecord(chunk[i], params, vocab, config);
              }
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (const auto& item : chunk) {
      if (item.output) {
        out << *item.output << '\n';
        ++stats.ok;
      } else {
        ++stats.failed;
      }
    }
    out.flush();
  }
  return stats;
}

}  // namespace channelsum
