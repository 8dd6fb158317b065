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
#include <map>
#include <string>
#include <vector>

#include "matrix_kind.hpp"
#include "simkernel.hpp"
#include "typology.hpp"

namespace typosim {

struct PairScores {
  LanguagePair pair;
  std::array<double, kCellCount> scores{};  // biCKA per (kind, layer), cell_index order
  double sigma_synt = 0.0;
  double sigma_morph = 0.0;

  double score(MatrixKind kind, int layer) const { return scores[cell_index(kind, layer)]; }
  double sigma(Area area) const { return area == Area::Syntactic ? sigma_synt : sigma_morph; }
};

// biCKA scores for every configured language pair, sorted by pair.
struct PairSimilarityTable {
  Centering centering = Centering::Centered;
  std::vector<PairScores> rows;
  std::map<std::string, std::string> digests;  // language -> checkpoint sha256

  const PairScores& at(const LanguagePair& pair) const;
  std::vector<LanguagePair> pairs() const;
};

}  // namespace typosim
