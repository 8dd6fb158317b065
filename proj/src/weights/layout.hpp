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
#include <filesystem>
#include <string>
#include <vector>

#include "matrix_kind.hpp"
#include "simkernel.hpp"
#include "weights/tensor_container.hpp"

namespace typosim {

// Tensor name templates; "{prefix}" and "{L}" are substituted.
struct LayoutConfig {
  std::string name = "bert";
  std::vector<std::string> prefix_candidates = {"", "bert."};
  int layer_count = kLayerCount;
  std::array<std::string, kKindCount> templates;
};

LayoutConfig default_layout();
LayoutConfig parse_layout_config(const std::string& json_text);
LayoutConfig load_layout_config(const std::filesystem::path& path);
std::string layout_config_json(const LayoutConfig& config);

struct LayoutMap {
  std::string name;
  std::string prefix;
  int layer_count = 0;
  std::array<std::string, kKindCount> templates;

  std::string tensor_name(MatrixKind kind, int layer) const;
};

/// Picks the first prefix candidate under which every (kind, layer) name
/// exists. Throws LayoutMismatch listing the names missing under the closest
/// candidate otherwise.
LayoutMap resolve_layout(const LayoutConfig& config, const TensorContainer& container);

struct WeightMatrix {
  std::string language;
  int layer = 0;
  MatrixKind kind = MatrixKind::Q;
  Matrix data;  // as stored: rows x cols
};

WeightMatrix extract(const TensorContainer& container, const LayoutMap& layout, int layer, MatrixKind kind,
                     const std::string& language = {});

struct ArchitectureReport {
  std::int64_t hidden_size = 0;
  std::int64_t intermediate_size = 0;
  int layer_count = 0;
  // stored (rows, cols) per kind and layer
  std::array<std::vector<std::array<std::int64_t, 2>>, kKindCount> shapes;
  bool ok = false;

  std::string to_json() const;
};

/// Header-only shape checks: Q, K, V, OA square (h, h); DI and DO (4h, h) or
/// (h, 4h) with one orientation across all layers; layer count equal to
/// `expected_layers` (an extra layer present in the container also counts as
/// a mismatch).
ArchitectureReport validate_model(const TensorContainer& container, const LayoutMap& layout,
                                  int expected_layers = kLayerCount);

// Throws ArchitectureMismatch unless both models share hidden and intermediate sizes.
void check_comparable(const ArchitectureReport& a, const std::string& name_a, const ArchitectureReport& b,
                      const std::string& name_b);

}  // namespace typosim
