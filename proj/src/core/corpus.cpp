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

#include "channelsum/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include <json.hpp>

#include "channelsum/error.hpp"
#include "channelsum/text.hpp"

namespace channelsum {
namespace {

using nlohmann::json;

std::vector<std::string> NormalizedKept(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& text : raw) {
    auto tokens = NormalizeSentence(text);
    if (tokens.size() < kMinSentenceTokens) continue;
    out.push_back(JoinTokens(tokens));
  }
  return out;
}

std::vector<std::string> StringList(const json& record, const char* key,
                                    std::size_t line_number) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_array()) {
    throw Error(ErrorCode::kMalformedRecord,
                "line " + std::to_string(line_number) + ": missing array \"" +
                    key + "\"");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_number) + ": \"" + key +
                      "\" must contain strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Vocabulary::Vocabulary() {
  id_to_token_ = {std::string(kUnkToken), std::string(kZeroToken)};
  token_to_id_ = {{id_to_token_[0], kUnkId}, {id_to_token_[1], kZeroId}};
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kUnkToken || tokens[1] != kZeroToken) {
    throw Error(ErrorCode::kInvalidArgument,
                "vocabulary must start with <unk> and <zero>");
  }
  Vocabulary v;
  v.token_to_id_.clear();
  v.id_to_token_ = std::move(tokens);
  for (std::size_t i = 0; i < v.id_to_token_.size(); ++i) {
    auto [it, inserted] =
        v.token_to_id_.emplace(v.id_to_token_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate vocabulary token: " + v.id_to_token_[i]);
    }
  }
  return v;
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return FromTokens(std::move(tokens));
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& t : id_to_token_) out << t << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

TokenId Vocabulary::Lookup(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

std::string Vocabulary::Digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : id_to_token_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RawPair PreprocessText(const RawPair& raw) {
  RawPair out;
  out.id = raw.id;
  out.document = NormalizedKept(raw.document);
  out.summary = NormalizedKept(raw.summary);
  if (out.document.empty() || out.summary.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter,
                "record " + raw.id + ": no " +
                    (out.document.empty() ? "document" : "summary") +
                    " sentence has at least 4 tokens");
  }
  return out;
}

std::vector<Sentence> PreprocessSentences(const std::vector<std::string>& sentences,
                                          const Vocabulary& vocab) {
  std::vector<Sentence> out;
  for (const auto& text : sentences) {
    auto tokens = NormalizeSentence(text);
    if (tokens.size() < kMinSentenceTokens) continue;
    Sentence s;
    s.tokens.reserve(tokens.size());
    for (const auto& t : tokens) s.tokens.push_back(vocab.Lookup(t));
    s.raw = text;
    s.byte_len = text.size();
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<Document, SummaryCandidate> PreprocessPair(const RawPair& raw,
                                                     const Vocabulary& vocab) {
  Document doc{PreprocessSentences(raw.document, vocab)};
  SummaryCandidate summary{PreprocessSentences(raw.summary, vocab), Provenance::kGold};
  if (doc.sentences.empty() || summary.sentences.empty()) {
    throw Error(ErrorCode::kEmptyAfterFilter,
                "record " + raw.id + ": no " +
                    (doc.sentences.empty() ? "document" : "summary") +
                    " sentence has at least 4 tokens");
  }
  return {std::move(doc), std::move(summary)};
}

void VocabularyBuilder::Add(const RawPair& pair) {
  auto add = [&](const std::vector<std::string>& sentences) {
    for (const auto& text : sentences) {
      auto tokens = NormalizeSentence(text);
      if (tokens.size() < kMinSentenceTokens) continue;
      for (auto& t : tokens) {
        if (t == kUnkToken || t == kZeroToken) {
          ++position_;
          continue;
        }
        auto [it, inserted] = counts_.try_emplace(std::move(t));
        if (inserted) it->second.first_pos = position_;
        ++it->second.count;
        ++position_;
      }
    }
  };
  add(pair.document);
  add(pair.summary);
}

Vocabulary VocabularyBuilder::Build(std::size_t max_size) const {
  std::vector<std::pair<const std::string*, Entry>> ranked;
  ranked.reserve(counts_.size());
  for (const auto& [token, entry] : counts_) ranked.emplace_back(&token, entry);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_pos < b.second.first_pos;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> tokens{std::string(kUnkToken), std::string(kZeroToken)};
  for (const auto& [token, entry] : ranked) tokens.push_back(*token);
  return Vocabulary::FromTokens(std::move(tokens));
}

Vocabulary BuildVocabulary(std::span<const RawPair> corpus, std::size_t max_size) {
  VocabularyBuilder builder;
  for (const auto& p : corpus) builder.Add(p);
  return builder.Build(max_size);
}

EmbeddingTable RandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed) {
  EmbeddingTable table;
  table.rows = vocab.size();
  table.dim = dim;
  table.values.resize(table.rows * dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-0.05f, 0.05f);
  for (auto& v : table.values) {
    // The float distribution can round up to its upper bound.
    do {
      v = dist(rng);
    } while (v >= 0.05f);
  }
  return table;
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path& path,
                              const Vocabulary& vocab, std::size_t dim,
                              std::uint64_t seed) {
  EmbeddingTable table = RandomEmbeddings(vocab, dim, seed);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<bool> seen(vocab.size(), false);
  std::vector<float> row(dim);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    const char* token_end = p;
    while (token_end < end && *token_end != ' ') ++token_end;
    std::string_view token(p, token_end - p);
    std::size_t count = 0;
    for (const char* q = token_end; q < end;) {
      while (q < end && *q == ' ') ++q;
      if (q >= end) break;
      double value = 0.0;
      auto [next, ec] = std::from_chars(q, end, value);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw Error(ErrorCode::kMalformedLine,
                    path.string() + ":" + std::to_string(line_number) +
                        ": cannot parse value");
      }
      if (count < dim) row[count] = static_cast<float>(value);
      ++count;
      q = next;
    }
    if (count != dim) {
      throw Error(ErrorCode::kDimMismatch,
                  path.string() + ":" + std::to_string(line_number) +
                      ": expected " + std::to_string(dim) + " values, got " +
                      std::to_string(count));
    }
    const TokenId id = vocab.Lookup(token);
    if (id == Vocabulary::kUnkId && token != kUnkToken) continue;
    if (seen[id]) continue;
    for (float v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedLine,
                    path.string() + ":" + std::to_string(line_number) +
                        ": non-finite value");
      }
    }
    seen[id] = true;
    std::copy(row.begin(), row.end(), table.values.begin() + id * dim);
    ++table.found;
  }
  return table;
}

RawPair ParseRecord(std::string_view line, std::size_t line_number) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded() || !record.is_object()) {
    throw Error(ErrorCode::kMalformedRecord,
                "line " + std::to_string(line_number) + ": not a JSON object");
  }
  auto id = record.find("id");
  if (id == record.end() || !id->is_string()) {
    throw Error(ErrorCode::kMalformedRecord,
                "line " + std::to_string(line_number) + ": missing string \"id\"");
  }
  RawPair pair;
  pair.id = id->get<std::string>();
  pair.document = StringList(record, "document", line_number);
  pair.summary = StringList(record, "summary", line_number);
  return pair;
}

std::string RecordToJson(const RawPair& pair) {
  json record = {{"id", pair.id},
                 {"document", pair.document},
                 {"summary", pair.summary}};
  return record.dump(-1, ' ', false, json::error_handler_t::replace);
}

CorpusReader::CorpusReader(const std::filesystem::path& path)
    : in_(path), path_(path) {
  if (!in_) throw Error(ErrorCode::kIo, "cannot open " + path.string());
}

std::optional<RawPair> CorpusReader::Next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return ParseRecord(line, line_number_);
  }
  return std::nullopt;
}

CorpusWriter::CorpusWriter(const std::filesystem::path& path)
    : file_(path), out_(&file_) {
  if (!file_) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

CorpusWriter::CorpusWriter(std::ostream& out) : out_(&out) {}

void CorpusWriter::Write(const RawPair& pair) { WriteLine(RecordToJson(pair)); }

void CorpusWriter::WriteLine(const std::string& json_line) {
  *out_ << json_line << '\n';
  if (!*out_) throw Error(ErrorCode::kIo, "corpus write failed");
}

void CorpusWriter::Flush() { out_->flush(); }

std::vector<RawPair> ReadCorpus(const std::filesystem::path& path) {
  CorpusReader reader(path);
  std::vector<RawPair> pairs;
  while (auto p = reader.Next()) pairs.push_back(std::move(*p));
  return pairs;
}

void WriteCorpus(const std::filesystem::path& path,
                 std::span<const RawPair> pairs) {
  CorpusWriter writer(path);
  for (const auto& p : pairs) writer.Write(p);
  writer.Flush();
}

}  // namespace channelsum
