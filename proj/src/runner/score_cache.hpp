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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "matrix_kind.hpp"
#include "simkernel.hpp"

namespace typosim {

/// Append-only store of biCKA scores keyed by (checkpoint digests, kind,
/// layer, centering). Digests are kept in sorted order, and callers evaluate
/// the score in that same order, so a cached value equals a recomputation
/// bit for bit. Values are stored as hex floats.
class ScoreCache {
 public:
  struct Key {
    std::string digest_lo;
    std::string digest_hi;
    MatrixKind kind = MatrixKind::Q;
    int layer = 0;
    Centering centering = Centering::Centered;

    static Key make(const std::string& a, const std::string& b, MatrixKind kind, int layer, Centering c);
    friend bool operator<(const Key& x, const Key& y) {
      return std::tie(x.digest_lo, x.digest_hi, x.kind, x.layer, x.centering) <
             std::tie(y.digest_lo, y.digest_hi, y.kind, y.layer, y.centering);
    }
  };

  // An empty path gives an in-memory cache.
  explicit ScoreCache(std::filesystem::path file);

  std::optional<double> find(const Key& key) const;
  void append(const std::vector<std::pair<Key, double>>& entries);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  std::map<Key, double> scores_;
  mutable std::mutex mutex_;
};

}  // namespace typosim
