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

#include <functional>
#include <string>
#include <vector>

#include "pair_table.hpp"
#include "runner/config.hpp"
#include "runner/fetch.hpp"
#include "runner/pair_compute.hpp"
#include "stats.hpp"
#include "typoclusters.hpp"

namespace typosim {

struct GridReport {
  std::string id;  // file stem, e.g. "full_syntactic", "focused_S1xS2_syntactic"
  CorrelationGrid grid;
  bool delta = false;  // post - pre rho; p undefined
};

struct FocusReport {
  FocusPair clusters;
  Area space = Area::Syntactic;
  std::vector<std::string> first_members;
  std::vector<std::string> second_members;
  std::vector<LanguagePair> pairs;
  std::vector<FeatureImpurityTriple> distinctive;
  std::vector<FeatureId> polarizing;
};

struct DeltaSummary {
  Area space = Area::Syntactic;
  DeltaWindow window;
  double mean_delta = 0.0;
  std::size_t cells = 0;
};

struct NamedTable {
  std::string id;  // "full", "focused", "adapted_pre", "adapted_post"
  PairSimilarityTable table;
};

struct ReportBundle {
  Mode mode = Mode::Full;
  Centering centering = Centering::Centered;
  Tail tail = Tail::TwoSided;
  double significance = 0.01;
  double report_threshold = 0.5;
  std::vector<GridReport> grids;
  std::vector<Clustering> clusterings;
  std::vector<FocusReport> focus;
  std::vector<DeltaSummary> deltas;
  std::vector<NamedTable> tables;
  PairComputeStats compute;
  std::vector<std::string> manifest;  // filled by emit_reports

  const GridReport& grid(std::string_view id) const;
};

struct RunOptions {
  FetchOptions fetch;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

// Typology tables for both areas, restricted checks against the roster.
struct TypologyData {
  TypologyTable syntactic;
  TypologyTable morphological;

  const TypologyTable& table(Area area) const { return area == Area::Syntactic ? syntactic : morphological; }
};

TypologyData load_typology(const ExperimentConfig& config);

// Every unordered pair of `languages`.
std::vector<LanguagePair> all_pairs(std::span<const std::string> languages);

/// Clusters the roster languages in `space` with the configured k, seed and restarts.
Clustering cluster_roster(const ExperimentConfig& config, const TypologyData& typology, Area space);

void fill_sigma(PairSimilarityTable& table, const TypologyData& typology);
SigmaMap sigma_map(const PairSimilarityTable& table, Area space);
PairSimilarityTable restrict_table(const PairSimilarityTable& table, std::span<const LanguagePair> pairs);

/// Scores for the configured mode's pair set, checkpoints fetched as needed.
/// For adapted mode `adapted` selects the post-adaptation checkpoint set.
PairSimilarityTable compute_pair_table(const ExperimentConfig& config, const std::vector<LanguagePair>& pairs,
                                       bool adapted = false, const RunOptions& options = {},
                                       PairComputeStats* stats = nullptr);

ReportBundle run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace typosim
