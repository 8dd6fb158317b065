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

#include "runner/score_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace typosim {

ScoreCache::Key ScoreCache::Key::make(const std::string& a, const std::string& b, MatrixKind kind, int layer,
                                      Centering c) {
  return a <= b ? Key{a, b, kind, layer, c} : Key{b, a, kind, layer, c};
}

ScoreCache::ScoreCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.empty()) return;
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    // torn trailing lines from an interrupted run are skipped
    std::istringstream fields(line);
    std::string lo, hi, kind, centering, value;
    int layer = -1;
    if (!(fields >> lo >> hi >> kind >> layer >> centering >> value)) continue;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') continue;
    try {
      scores_[Key{lo, hi, parse_kind(kind), layer, parse_centering(centering)}] = v;
    } catch (const Error&) {
      continue;
    }
  }
}

std::optional<double> ScoreCache::find(const Key& key) const {
  std::lock_guard lock(mutex_);
  const auto it = scores_.find(key);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::append(const std::vector<std::pair<Key, double>>& entries) {
  std::lock_guard lock(mutex_);
  std::string text;
  char buf[64];
  for (const auto& [key, value] : entries) {
    if (!scores_.emplace(key, value).second) continue;
    std::snprintf(buf, sizeof buf, "%a", value);
    text += key.digest_lo + '\t' + key.digest_hi + '\t' + std::string(kind_name(key.kind)) + '\t' +
            std::to_string(key.layer) + '\t' + std::string(centering_name(key.centering)) + '\t' + buf + '\n';
  }
  if (file_.empty() || text.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(file_.parent_path(), ec);
  std::ofstream out(file_, std::ios::app);
  if (!out) fail(ErrorCode::Io, "cannot append to score cache " + file_.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::Io, "short write to score cache " + file_.string());
}

std::size_t ScoreCache::size() const {
  std::lock_guard lock(mutex_);
  return scores_.size();
}

}  // namespace typosim
