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

#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "error.hpp"

namespace typosim {

const PairScores& PairSimilarityTable::at(const LanguagePair& pair) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), pair,
                                   [](const PairScores& r, const LanguagePair& p) { return r.pair < p; });
  if (it == rows.end() || it->pair != pair) {
    fail(ErrorCode::PairSetMismatch, "pair " + pair.label() + " not in table");
  }
  return *it;
}

std::vector<LanguagePair> PairSimilarityTable::pairs() const {
  std::vector<LanguagePair> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.pair);
  return out;
}

std::vector<double> rank_with_ties(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::InsufficientData, "cannot rank an empty series");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "series contains NaN or Inf");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i+1 .. j (1-based) share their mean
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::InvalidArgument, "series lengths differ: " + std::to_string(a.size()) +
                                         " vs " + std::to_string(b.size()));
  }
  if (a.size() < 3) fail(ErrorCode::InsufficientData, "spearman needs n >= 3");
  const auto ra = rank_with_ties(a);
  const auto rb = rank_with_ties(b);
  const double n = static_cast<double>(ra.size());
  // mean rank is (n+1)/2 exactly
  const double mean = 0.5 * (n + 1.0);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) fail(ErrorCode::DegenerateSeries, "constant series has no rank variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string_view tail_name(Tail tail) noexcept {
  return tail == Tail::TwoSided ? "two-sided" : "greater";
}

Tail parse_tail(std::string_view text) {
  if (text == "two-sided") return Tail::TwoSided;
  if (text == "greater" || text == "one-sided") return Tail::Greater;
  fail(ErrorCode::InvalidArgument, "unknown tail '" + std::string(text) + "'");
}

double t_statistic(double rho, std::size_t n) {
  if (n < 3) fail(ErrorCode::InsufficientData, "t statistic needs n >= 3");
  if (!std::isfinite(rho) || std::abs(rho) > 1.0) {
    fail(ErrorCode::NonFiniteValue, "rho must lie in [-1, 1]");
  }
  if (std::abs(rho) == 1.0) return std::copysign(HUGE_VAL, rho);
  const double df = static_cast<double>(n - 2);
  return rho * std::sqrt(df / ((1.0 - rho) * (1.0 + rho)));
}

double p_value(double rho, std::size_t n, Tail tail) {
  const double t = t_statistic(rho, n);
  const double df = static_cast<double>(n - 2);
  double two_sided = 0.0;
  if (std::isfinite(t)) {
    // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2); the argument is written via
    // 1 - rho^2 to avoid forming t^2 for large t.
    const double x = (1.0 - rho) * (1.0 + rho);
    two_sided = x >= 1.0 ? 1.0 : boost::math::ibeta(0.5 * df, 0.5, x);
  }
  if (tail == Tail::TwoSided) return std::clamp(two_sided, 0.0, 1.0);
  const double upper = rho >= 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
  return std::clamp(upper, 0.0, 1.0);
}

CorrelationGrid correlation_grid(const PairSimilarityTable& table, const SigmaMap& sigma, Area space,
                                 std::string pair_set, Tail tail) {
  if (table.rows.size() != sigma.size()) {
    fail(ErrorCode::PairSetMismatch, std::to_string(table.rows.size()) + " scored pairs vs " +
                                         std::to_string(sigma.size()) + " typological pairs");
  }
  std::vector<double> typ;
  typ.reserve(sigma.size());
  for (const auto& row : table.rows) {
    const auto it = sigma.find(row.pair);
    if (it == sigma.end()) {
      fail(ErrorCode::PairSetMismatch, "pair " + row.pair.label() + " has no typological similarity");
    }
    typ.push_back(it->second);
  }
  if (typ.size() < 3) fail(ErrorCode::InsufficientData, "correlation grid needs >= 3 pairs");

  CorrelationGrid grid;
  grid.space = space;
  grid.pair_set = std::move(pair_set);
  grid.n = typ.size();
  std::vector<double> scores(typ.size());
  for (auto kind : kAllKinds) {
    for (int layer = 0; layer < kLayerCount; ++layer) {
      for (std::size_t i = 0; i < table.rows.size(); ++i) scores[i] = table.rows[i].score(kind, layer);
      auto& cell = grid.cell(kind, layer);
      cell.kind = kind;
      cell.layer = layer;
      cell.n = typ.size();
      cell.rho = spearman(scores, typ);
      cell.p = p_value(cell.rho, cell.n, tail);
    }
  }
  return grid;
}

}  // namespace typosim
