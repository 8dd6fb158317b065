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

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pair_table.hpp"
#include "runner/fetch.hpp"
#include "runner/score_cache.hpp"
#include "weights/layout.hpp"

namespace typosim {

struct Model {
  std::string language;
  std::filesystem::path path;
  std::string digest;
  TensorContainer container;
  LayoutMap layout;
  ArchitectureReport architecture;
};

/// Opens, resolves and validates every checkpoint, then checks that all
/// models are mutually comparable. Header-only work; no tensor is decoded.
std::vector<Model> open_models(const std::map<std::string, LocalCheckpoint>& checkpoints,
                               const LayoutConfig& layout, int expected_layers = kLayerCount);

struct PairComputeStats {
  std::size_t scores_computed = 0;
  std::size_t scores_cached = 0;
  std::size_t matrices_read = 0;
};

/// Runs fn(0..count-1) on up to `threads` workers. The exception thrown for
/// the lowest index, if any, is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// biCKA for every pair and every (kind, layer) cell. Work is grouped by
/// cell: each model's matrix is read and prepared once per cell, then the
/// pairs of that cell run in parallel into fixed slots. Scores already in
/// `cache` are reused; new ones are appended after each cell completes.
/// Sigma columns are left at zero.
PairSimilarityTable compute_pair_table(const std::vector<const Model*>& models,
                                       const std::vector<LanguagePair>& pairs, Centering centering,
                                       std::size_t parallelism, ScoreCache& cache,
                                       PairComputeStats* stats = nullptr);

}  // namespace typosim
