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

#include <array>
#include <cstddef>
#include <string_view>

namespace typosim {

// Per-layer encoder weight matrices: attention query/key/value, attention
// output dense, feed-forward intermediate dense, feed-forward output dense.
enum class MatrixKind { Q, K, V, OA, DI, DO };

inline constexpr std::size_t kKindCount = 6;
inline constexpr int kLayerCount = 12;
inline constexpr std::size_t kCellCount = kKindCount * kLayerCount;

inline constexpr std::array<MatrixKind, kKindCount> kAllKinds = {
    MatrixKind::Q, MatrixKind::K, MatrixKind::V, MatrixKind::OA, MatrixKind::DI, MatrixKind::DO};

std::string_view kind_name(MatrixKind kind) noexcept;
MatrixKind parse_kind(std::string_view text);

constexpr std::size_t kind_index(MatrixKind kind) noexcept { return static_cast<std::size_t>(kind); }

constexpr std::size_t cell_index(MatrixKind kind, int layer) noexcept {
  return kind_index(kind) * kLayerCount + static_cast<std::size_t>(layer);
}

}  // namespace typosim
