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

#include "error.hpp"

namespace typosim {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::MalformedValue: return "MalformedValue";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::InsufficientLanguages: return "InsufficientLanguages";
    case ErrorCode::CorruptContainer: return "CorruptContainer";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::NonFiniteWeights: return "NonFiniteWeights";
    case ErrorCode::BadTensorRank: return "BadTensorRank";
    case ErrorCode::ArchitectureMismatch: return "ArchitectureMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::PairSetMismatch: return "PairSetMismatch";
    case ErrorCode::BadClusterCount: return "BadClusterCount";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ClustersOverlap: return "ClustersOverlap";
    case ErrorCode::Integrity: return "IntegrityError";
    case ErrorCode::Fetch: return "FetchError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Internal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace typosim
