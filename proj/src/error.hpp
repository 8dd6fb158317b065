/*
 * Copyright 2026 The typosim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace typosim {

// Numeric values are the C API status codes (see typosim.h).
enum class ErrorCode : int {
  InvalidArgument = 1,
  Io = 2,
  MissingFeature = 3,
  MalformedValue = 4,
  SpaceMismatch = 5,
  UnknownDimension = 6,
  InsufficientLanguages = 7,
  CorruptContainer = 8,
  LayoutMismatch = 9,
  NonFiniteWeights = 10,
  BadTensorRank = 11,
  ArchitectureMismatch = 12,
  ShapeMismatch = 13,
  DegenerateInput = 14,
  NonFiniteValue = 15,
  DegenerateSeries = 16,
  InsufficientData = 17,
  PairSetMismatch = 18,
  BadClusterCount = 19,
  EmptySet = 20,
  ClustersOverlap = 21,
  Integrity = 22,
  Fetch = 23,
  Config = 24,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace typosim
