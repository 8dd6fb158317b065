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

#include "matrix_kind.hpp"

#include <string>

#include "error.hpp"

namespace typosim {

std::string_view kind_name(MatrixKind kind) noexcept {
  switch (kind) {
    case MatrixKind::Q: return "Q";
    case MatrixKind::K: return "K";
    case MatrixKind::V: return "V";
    case MatrixKind::OA: return "OA";
    case MatrixKind::DI: return "DI";
    case MatrixKind::DO: return "DO";
  }
  return "?";
}

MatrixKind parse_kind(std::string_view text) {
  for (auto kind : kAllKinds) {
    if (kind_name(kind) == text) return kind;
  }
  fail(ErrorCode::InvalidArgument, "unknown matrix kind '" + std::string(text) + "'");
}

}  // namespace typosim
