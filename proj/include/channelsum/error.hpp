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

#include <stdexcept>
#include <string>

namespace channelsum {

// Values are part of the C ABI (see channelsum.h); append only.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kMalformedRecord = 3,
  kMalformedLine = 4,
  kDimMismatch = 5,
  kShapeMismatch = 6,
  kNotScalar = 7,
  kEmptyInput = 8,
  kEmptySentence = 9,
  kEmptyAfterFilter = 10,
  kTooShortDocument = 11,
  kNonFiniteLoss = 12,
  kVersionMismatch = 13,
  kCorruptBlob = 14,
  kIdMismatch = 15,
  kNonFiniteValue = 16,
  kInternal = 99,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace channelsum
