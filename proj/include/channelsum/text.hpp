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

#include <string>
#include <string_view>
#include <vector>

namespace channelsum {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kZeroToken = "<zero>";

// Sentences with fewer tokens than this are dropped during preprocessing.
inline constexpr std::size_t kMinSentenceTokens = 4;

// Splits on ASCII whitespace and separates the characters . , ! ? ; : ' " ( )
// from neighbouring text. A '.' or ',' with a digit on both sides stays inside
// the token so that "1,234.5" survives as one number.
std::vector<std::string> Tokenize(std::string_view text);

// ASCII lowercasing; bytes >= 0x80 pass through untouched.
std::string ToLowerAscii(std::string_view text);

// Optional sign, digits, then any number of [.,]digits groups.
bool IsNumberToken(std::string_view token);

// Lowercase, tokenize, and replace numbers with kZeroToken.
std::vector<std::string> NormalizeSentence(std::string_view raw);

std::string JoinTokens(const std::vector<std::string>& tokens);

// Longest prefix of `text` that is at most `max_bytes` long and does not end
// inside a UTF-8 multi-byte sequence.
std::string_view TruncateUtf8(std::string_view text, std::size_t max_bytes);

}  // namespace channelsum
