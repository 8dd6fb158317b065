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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

namespace typosim {

// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

/// Persistent memo of file digests keyed by (absolute path, size, mtime), so
/// unchanged multi-gigabyte checkpoints are hashed once.
class DigestCache {
 public:
  explicit DigestCache(std::filesystem::path store);

  std::string digest(const std::filesystem::path& file);
  void record(const std::filesystem::path& file, const std::string& digest);

 private:
  struct Entry {
    std::uintmax_t size = 0;
    long long mtime = 0;
    std::string digest;
  };
  void save() const;

  std::filesystem::path store_;
  std::map<std::string, Entry> entries_;
  std::mutex mutex_;
};

}  // namespace typosim
