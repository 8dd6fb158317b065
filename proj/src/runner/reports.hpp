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

#include <filesystem>
#include <string>
#include <vector>

#include "runner/experiment.hpp"

namespace typosim {

/// Grid CSV: "# key=value" metadata lines, a header "matrix,0,...,11", then
/// one row per kind (Q, K, V, OA, DI, DO) with cells "rho;p" printed with 17
/// significant digits so that parsing restores every double exactly.
std::string grid_to_csv(const CorrelationGrid& grid);
CorrelationGrid parse_grid_csv(const std::string& text);

std::string pair_table_to_csv(const PairSimilarityTable& table);

/// Heatmap over layers x kinds with a diverging scale (-1 blue, 0 black,
/// +1 red) and an asterisk on every cell with p < significance.
std::string grid_to_svg(const CorrelationGrid& grid, const std::string& title, double significance);

// RGB of the diverging scale for rho clamped to [-1, 1].
std::array<int, 3> diverging_color(double rho);

std::string grid_summary_json(const GridReport& report, const ReportBundle& bundle);
std::string bundle_summary_json(const ReportBundle& bundle);

/// Writes every grid (csv, json, svg), every pair table (csv) and summary.json
/// into `dir`; returns the written file names (relative to `dir`) in order.
std::vector<std::string> emit_reports(ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace typosim
