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

#include "channelsum/text.hpp"

#include <cctype>

namespace channelsum {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsSplitPunct(char c) {
  switch (c) {
    case '.':
    case ',':
    case '!':
    case '?':
    case ';':
    case ':':
    case '\'':
    case '"':
    case '(':
    case ')':
      return true;
    default:
      return false;
  }
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (IsSpace(c)) {
      flush();
      continue;
    }
    if (IsSplitPunct(c)) {
      const bool numeric_separator =
          (c == '.' || c == ',') && !current.empty() && IsDigit(current.back()) &&
          i + 1 < text.size() && IsDigit(text[i + 1]);
      if (!numeric_separator) {
        flush();
        tokens.emplace_back(1, c);
        continue;
      }
    }
    current.push_back(c);
  }
  flush();
  return tokens;
}

std::string ToLowerAscii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsNumberToken(std::string_view token) {
  std::size_t i = 0;
  if (i < token.size() && (token[i] == '+' || token[i] == '-')) ++i;
  if (i >= token.size() || !IsDigit(token[i])) return false;
  while (i < token.size() && IsDigit(token[i])) ++i;
  while (i < token.size()) {
    if (token[i] != '.' && token[i] != ',') return false;
    ++i;
    if (i >= token.size() || !IsDigit(token[i])) return false;
    while (i < token.size() && IsDigit(token[i])) ++i;
  }
  return true;
}

std::vector<std::string> NormalizeSentence(std::string_view raw) {
  std::vector<std::string> tokens = Tokenize(ToLowerAscii(raw));
  for (auto& t : tokens) {
    if (IsNumberToken(t)) t = std::string(kZeroToken);
  }
  return tokens;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string_view TruncateUtf8(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return text;
  std::size_t end = max_bytes;
  // Back off while the first excluded byte is a continuation byte.
  while (end > 0 &&
         (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) {
    --end;
  }
  return text.substr(0, end);
}

}  // namespace channelsum
