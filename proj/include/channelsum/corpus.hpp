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

// Corpus records, preprocessing, vocabulary and pretrained embeddings.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace channelsum {

using TokenId = std::int32_t;

struct RawPair {
  std::string id;
  std::vector<std::string> document;
  std::vector<std::string> summary;

  bool operator==(const RawPair&) const = default;
};

struct Sentence {
  std::vector<TokenId> tokens;
  std::string raw;
  std::size_t byte_len = 0;
};

struct Document {
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  const Sentence& operator[](std::size_t i) const { return sentences[i]; }
};

enum class Provenance { kGold, kConstructed, kExtracted };

struct SummaryCandidate {
  std::vector<Sentence> sentences;
  Provenance provenance = Provenance::kGold;

  std::size_t size() const { return sentences.size(); }
  const Sentence& operator[](std::size_t i) const { return sentences[i]; }
};

class Vocabulary {
 public:
  static constexpr TokenId kUnkId = 0;
  static constexpr TokenId kZeroId = 1;

  // Only the special tokens.
  Vocabulary();

  // `tokens` must start with the two specials; throws otherwise.
  static Vocabulary FromTokens(std::vector<std::string> tokens);
  static Vocabulary Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  // Total: unknown tokens map to kUnkId.
  TokenId Lookup(std::string_view token) const;
  const std::string& Token(TokenId id) const { return id_to_token_.at(id); }
  std::size_t size() const { return id_to_token_.size(); }
  TokenId unk_id() const { return kUnkId; }
  TokenId zero_placeholder_id() const { return kZeroId; }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // FNV-1a 64 over the token list, hex encoded. Stored in checkpoints.
  std::string Digest() const;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Text-level preprocessing: every kept sentence is its normalized tokens
// joined by single spaces, short sentences removed. Idempotent.
// Throws kEmptyAfterFilter when either side ends up empty.
RawPair PreprocessText(const RawPair& raw);

// Sentence-level step of PreprocessPair; may return an empty list.
std::vector<Sentence> PreprocessSentences(const std::vector<std::string>& sentences,
                                          const Vocabulary& vocab);

// Normalizes, filters and maps tokens to ids. `Sentence::raw` keeps the
// original text of each kept sentence. Throws kEmptyAfterFilter.
std::pair<Document, SummaryCandidate> PreprocessPair(const RawPair& raw,
                                                     const Vocabulary& vocab);

// Frequency-ranked vocabulary over normalized tokens of sentences that survive
// the length filter. Ties go to the token seen first. The specials are always
// present and do not count towards max_size.
class VocabularyBuilder {
 public:
  void Add(const RawPair& pair);
  Vocabulary Build(std::size_t max_size = 50000) const;

 private:
  struct Entry {
    std::uint64_t count = 0;
    std::uint64_t first_pos = 0;
  };
  std::unordered_map<std::string, Entry> counts_;
  std::uint64_t position_ = 0;
};

Vocabulary BuildVocabulary(std::span<const RawPair> corpus,
                           std::size_t max_size = 50000);

struct EmbeddingTable {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;  // row-major rows x dim
  bool trainable = true;
  std::size_t found = 0;  // rows copied from the file

  std::span<const float> row(std::size_t r) const {
    return {values.data() + r * dim, dim};
  }
};

// Rows of tokens absent from the file are drawn from U(-0.05, 0.05).
EmbeddingTable RandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed);

// Text format: "token v1 ... v_dim" per line. Tokens outside the vocabulary
// are ignored; the first occurrence of a token wins.
EmbeddingTable LoadEmbeddings(const std::filesystem::path& path,
                              const Vocabulary& vocab, std::size_t dim,
                              std::uint64_t seed);

// Line-delimited JSON records {"id", "document", "summary"}.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path);

  // nullopt at end of file. Blank lines are skipped.
  std::optional<RawPair> Next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  std::size_t line_number_ = 0;
};

class CorpusWriter {
 public:
  explicit CorpusWriter(const std::filesystem::path& path);
  // Writes to an already open stream (e.g. stdout).
  explicit CorpusWriter(std::ostream& out);

  void Write(const RawPair& pair);
  void WriteLine(const std::string& json_line);
  void Flush();

 private:
  std::ofstream file_;
  std::ostream* out_;
};

RawPair ParseRecord(std::string_view line, std::size_t line_number);
std::string RecordToJson(const RawPair& pair);

std::vector<RawPair> ReadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::filesystem::path& path,
                 std::span<const RawPair> pairs);

}  // namespace channelsum
