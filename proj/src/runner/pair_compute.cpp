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

#include "runner/pair_compute.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "error.hpp"

namespace typosim {

std::vector<Model> open_models(const std::map<std::string, LocalCheckpoint>& checkpoints,
                               const LayoutConfig& layout, int expected_layers) {
  std::vector<Model> models;
  models.reserve(checkpoints.size());
  for (const auto& [language, ckpt] : checkpoints) {
    try {
      auto container = TensorContainer::open(ckpt.path);
      auto map = resolve_layout(layout, container);
      auto report = validate_model(container, map, expected_layers);
      models.push_back(Model{language, ckpt.path, ckpt.digest, std::move(container), std::move(map),
                             std::move(report)});
    } catch (const Error& e) {
      throw Error(e.code(), language + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < models.size(); ++i) {
    check_comparable(models[0].architecture, models[0].language, models[i].architecture, models[i].language);
  }
  return models;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::exception_ptr first_error;
  std::size_t first_index = count;
  std::mutex error_mutex;
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (i < first_index) {
        first_index = i;
        first_error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) guarded(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

PairSimilarityTable compute_pair_table(const std::vector<const Model*>& models,
                                       const std::vector<LanguagePair>& pairs_in, Centering centering,
                                       std::size_t parallelism, ScoreCache& cache, PairComputeStats* stats) {
  std::map<std::string, std::size_t> model_index;
  for (std::size_t i = 0; i < models.size(); ++i) model_index[models[i]->language] = i;

  auto pairs = pairs_in;
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
    fail(ErrorCode::PairSetMismatch, "duplicate language pair in pair set");
  }
  struct Slot {
    std::size_t lo;  // model index of the operand with the smaller digest
    std::size_t hi;
  };
  std::vector<Slot> slots;
  for (const auto& p : pairs) {
    const auto a = model_index.find(p.first);
    const auto b = model_index.find(p.second);
    if (a == model_index.end() || b == model_index.end()) {
      fail(ErrorCode::PairSetMismatch, "pair " + p.label() + " has no checkpoint");
    }
    const bool swap = models[b->second]->digest < models[a->second]->digest;
    slots.push_back(swap ? Slot{b->second, a->second} : Slot{a->second, b->second});
  }

  PairSimilarityTable table;
  table.centering = centering;
  table.rows.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) table.rows[i].pair = pairs[i];
  for (const auto* m : models) table.digests[m->language] = m->digest;

  PairComputeStats local;
  for (auto kind : kAllKinds) {
    for (int layer = 0; layer < kLayerCount; ++layer) {
      const auto cell = cell_index(kind, layer);
      std::vector<std::size_t> todo;
      std::vector<ScoreCache::Key> keys(pairs.size());
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        keys[i] = ScoreCache::Key::make(models[slots[i].lo]->digest, models[slots[i].hi]->digest, kind, layer,
                                        centering);
        if (const auto hit = cache.find(keys[i])) {
          table.rows[i].scores[cell] = *hit;
          ++local.scores_cached;
        } else {
          todo.push_back(i);
        }
      }
      if (todo.empty()) continue;

      std::vector<char> needed(models.size(), 0);
      for (auto i : todo) needed[slots[i].lo] = needed[slots[i].hi] = 1;
      std::vector<std::size_t> load;
      for (std::size_t m = 0; m < models.size(); ++m) {
        if (needed[m]) load.push_back(m);
      }
      std::vector<BickaOperand> operands(models.size());
      parallel_for(load.size(), parallelism, [&](std::size_t j) {
        const auto& model = *models[load[j]];
        try {
          const auto w = extract(model.container, model.layout, layer, kind, model.language);
          operands[load[j]] = prepare_operand(w.data, centering);
        } catch (const Error& e) {
          throw Error(e.code(), model.language + " " + std::string(kind_name(kind)) + std::to_string(layer) +
                                    ": " + e.what());
        }
      });
      local.matrices_read += load.size();

      parallel_for(todo.size(), parallelism, [&](std::size_t j) {
        const auto i = todo[j];
        try {
          table.rows[i].scores[cell] = bicka_prepared(operands[slots[i].lo], operands[slots[i].hi]);
        } catch (const Error& e) {
          throw Error(e.code(), "pair " + pairs[i].label() + " " + std::string(kind_name(kind)) +
                                    std::to_string(layer) + ": " + e.what());
        }
      });
      local.scores_computed += todo.size();

      std::vector<std::pair<ScoreCache::Key, double>> fresh;
      fresh.reserve(todo.size());
      for (auto i : todo) fresh.emplace_back(keys[i], table.rows[i].scores[cell]);
      cache.append(fresh);
    }
  }
  if (stats != nullptr) *stats = local;
  return table;
}

}  // namespace typosim
