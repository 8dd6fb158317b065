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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "matrix_kind.hpp"
#include "simkernel.hpp"
#include "stats.hpp"
#include "typology.hpp"

namespace typosim {

enum class Mode { Full, Focused, Adapted };

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

// A checkpoint location: local path or http(s) URL, with an optional
// expected SHA-256 (lowercase hex).
struct CheckpointRef {
  std::string location;
  std::string digest;

  bool is_url() const;
  bool empty() const { return location.empty(); }
};

struct RosterEntry {
  std::string language;
  CheckpointRef checkpoint;
  CheckpointRef adapted;
};

// Two clusters to contrast, by label ("S1", "M3", ...).
struct FocusPair {
  std::string first;
  std::string second;
};

struct DeltaWindow {
  int first_layer = 2;
  int last_layer = 6;
  std::vector<MatrixKind> kinds{kAllKinds.begin(), kAllKinds.end()};
};

struct ExperimentConfig {
  std::vector<RosterEntry> roster;
  std::filesystem::path syntactic_table;
  std::filesystem::path morphological_table;
  std::optional<std::filesystem::path> layout;  // default BERT naming when unset
  std::vector<Area> spaces{Area::Syntactic, Area::Morphological};
  Mode mode = Mode::Full;
  std::vector<FocusPair> focus;
  Centering centering = Centering::Centered;
  double significance = 0.01;
  double report_threshold = 0.5;
  std::size_t parallelism = 1;
  std::filesystem::path cache_dir = "typosim-cache";
  std::filesystem::path output_dir = "typosim-out";
  std::uint64_t seed = 42;
  std::size_t restarts = 500;
  std::size_t syntactic_clusters = 4;
  std::size_t morphological_clusters = 3;
  Tail tail = Tail::TwoSided;
  DeltaWindow delta_window;
  int layer_count = kLayerCount;

  std::vector<std::string> languages() const;
  const RosterEntry& entry(std::string_view language) const;
  std::size_t cluster_count(Area area) const;
};

/// Parses a JSON experiment config. Relative paths resolve against
/// `base_dir`; unset table paths fall back to the bundled tables.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_json(const ExperimentConfig& config);

// Consistency checks run before any heavy work; throws Config.
void validate_config(const ExperimentConfig& config);

std::filesystem::path bundled_data_dir();

}  // namespace typosim
