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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matrix_kind.hpp"
#include "pair_table.hpp"
#include "typology.hpp"

namespace typosim {

// Average ranks (1-based); tied values share the mean of the positions they cover.
std::vector<double> rank_with_ties(std::span<const double> values);

// Pearson correlation of the average ranks of a and b.
double spearman(std::span<const double> a, std::span<const double> b);

enum class Tail { TwoSided, Greater };

std::string_view tail_name(Tail tail) noexcept;
Tail parse_tail(std::string_view text);

// Student-t significance of a correlation coefficient, df = n - 2.
double t_statistic(double rho, std::size_t n);
double p_value(double rho, std::size_t n, Tail tail = Tail::TwoSided);

struct CorrelationCell {
  MatrixKind kind = MatrixKind::Q;
  int layer = 0;
  double rho = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

struct CorrelationGrid {
  Area space = Area::Syntactic;
  std::string pair_set = "full";  // "full", "S1xS2", "adapted-pre", ...
  std::size_t n = 0;
  std::array<CorrelationCell, kCellCount> cells{};

  const CorrelationCell& cell(MatrixKind kind, int layer) const {
    return cells[cell_index(kind, layer)];
  }
  CorrelationCell& cell(MatrixKind kind, int layer) { return cells[cell_index(kind, layer)]; }
};

using SigmaMap = std::map<LanguagePair, double>;

/// Spearman rho (and p) between biCKA scores and typological similarity, one
/// cell per (kind, layer), over the pairs common to both inputs. The pair sets
/// must agree exactly.
CorrelationGrid correlation_grid(const PairSimilarityTable& table, const SigmaMap& sigma,
                                 Area space, std::string pair_set = "full",
                                 Tail tail = Tail::TwoSided);

}  // namespace typosim
