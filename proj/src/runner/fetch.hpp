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
#include <functional>
#include <map>
#include <string>

#include "runner/config.hpp"
#include "runner/digest.hpp"

namespace typosim {

struct FetchOptions {
  int attempts = 3;
  long connect_timeout_s = 30;
  long low_speed_time_s = 120;  // abort below 1 KiB/s for this long
};

/// Downloads `url` to `dest`, resuming from `dest`.part when present. The
/// completed file's SHA-256 must equal `expected` when given (IntegrityError
/// otherwise, partial file removed). Returns the digest.
std::string fetch_file(const std::string& url, const std::filesystem::path& dest, const std::string& expected,
                       const FetchOptions& options = {});

struct LocalCheckpoint {
  std::filesystem::path path;
  std::string digest;
  bool downloaded = false;
};

struct CheckpointSet {
  std::map<std::string, LocalCheckpoint> base;     // language -> checkpoint
  std::map<std::string, LocalCheckpoint> adapted;  // languages with adapted checkpoints
  std::size_t downloads = 0;
};

/// Resolves every roster checkpoint to a verified local file. URLs are
/// downloaded into the cache directory unless a verified copy is already
/// there; local paths are digested (memoized) and checked against the
/// expected digest if one is configured.
CheckpointSet fetch_models(const ExperimentConfig& config, const FetchOptions& options = {});

}  // namespace typosim
