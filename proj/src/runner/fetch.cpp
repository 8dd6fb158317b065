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

#include "runner/fetch.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include <curl/curl.h>

#include "error.hpp"

namespace typosim {
namespace {

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

void ensure_curl() {
  static CurlGlobal global;
}

struct Sink {
  std::FILE* file = nullptr;
  long status = 0;
  bool resumed = false;
  bool checked = false;
  bool restart = false;  // server ignored the range request
  CURL* curl = nullptr;
};

std::size_t write_cb(char* data, std::size_t size, std::size_t n, void* user) {
  auto* sink = static_cast<Sink*>(user);
  if (!sink->checked) {
    sink->checked = true;
    curl_easy_getinfo(sink->curl, CURLINFO_RESPONSE_CODE, &sink->status);
    if (sink->resumed && sink->status == 200) {
      sink->restart = true;
      return 0;  // abort; caller retries from scratch
    }
    if (sink->status >= 400) return 0;
  }
  return std::fwrite(data, size, n, sink->file) * size;
}

enum class Outcome { Done, Retry, RangeUnsatisfiable };

Outcome transfer(const std::string& url, const std::filesystem::path& part, const FetchOptions& options,
                 std::string& error) {
  std::error_code ec;
  const auto have = std::filesystem::exists(part, ec) ? std::filesystem::file_size(part, ec) : 0;
  std::FILE* file = std::fopen(part.c_str(), have > 0 ? "ab" : "wb");
  if (file == nullptr) fail(ErrorCode::Io, "cannot write " + part.string());

  CURL* curl = curl_easy_init();
  if (curl == nullptr) {
    std::fclose(file);
    fail(ErrorCode::Fetch, "curl init failed");
  }
  Sink sink{file, 0, have > 0, false, false, curl};
  char errbuf[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_cb);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &sink);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, errbuf);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, options.connect_timeout_s);
  curl_easy_setopt(curl, CURLOPT_LOW_SPEED_LIMIT, 1024L);
  curl_easy_setopt(curl, CURLOPT_LOW_SPEED_TIME, options.low_speed_time_s);
  curl_easy_setopt(curl, CURLOPT_USERAGENT, "typosim-fetch/1");
  if (have > 0) curl_easy_setopt(curl, CURLOPT_RESUME_FROM_LARGE, static_cast<curl_off_t>(have));

  const CURLcode rc = curl_easy_perform(curl);
  long status = sink.status;
  if (!sink.checked) curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  curl_easy_cleanup(curl);
  std::fclose(file);

  if (sink.restart || status == 416) {
    std::filesystem::remove(part, ec);
    error = "server refused resume (HTTP " + std::to_string(status) + ")";
    return Outcome::RangeUnsatisfiable;
  }
  if (status >= 400) {
    std::filesystem::remove(part, ec);
    error = "HTTP " + std::to_string(status);
    return Outcome::Retry;
  }
  if (rc != CURLE_OK) {
    error = errbuf[0] != '\0' ? errbuf : curl_easy_strerror(rc);
    return Outcome::Retry;
  }
  return Outcome::Done;
}

std::filesystem::path cache_path_for(const ExperimentConfig& config, const std::string& url) {
  return config.cache_dir / "models" / (sha256_hex(url).substr(0, 24) + ".safetensors");
}

LocalCheckpoint resolve(const ExperimentConfig& config, const CheckpointRef& ref, const std::string& what,
                        DigestCache& digests, const FetchOptions& options) {
  LocalCheckpoint out;
  if (!ref.is_url()) {
    out.path = ref.location;
    if (!std::filesystem::is_regular_file(out.path)) {
      fail(ErrorCode::Io, what + ": checkpoint " + out.path.string() + " not found");
    }
    out.digest = digests.digest(out.path);
    if (!ref.digest.empty() && ref.digest != out.digest) {
      fail(ErrorCode::Integrity, what + ": " + out.path.string() + " has sha256 " + out.digest + ", expected " +
                                     ref.digest);
    }
    return out;
  }
  out.path = cache_path_for(config, ref.location);
  if (std::filesystem::is_regular_file(out.path)) {
    out.digest = digests.digest(out.path);
    if (ref.digest.empty() || ref.digest == out.digest) return out;
    std::filesystem::remove(out.path);  // stale or corrupted copy
  }
  try {
    out.digest = fetch_file(ref.location, out.path, ref.digest, options);
  } catch (const Error& e) {
    throw Error(e.code(), what + ": " + e.what());
  }
  digests.record(out.path, out.digest);
  out.downloaded = true;
  return out;
}

}  // namespace

std::string fetch_file(const std::string& url, const std::filesystem::path& dest, const std::string& expected,
                       const FetchOptions& options) {
  ensure_curl();
  std::error_code ec;
  if (!dest.parent_path().empty()) std::filesystem::create_directories(dest.parent_path(), ec);
  const std::filesystem::path part = dest.string() + ".part";
  std::string error;
  bool done = false;
  for (int attempt = 0; attempt < options.attempts && !done; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << std::min(attempt, 5)));
    switch (transfer(url, part, options, error)) {
      case Outcome::Done: done = true; break;
      case Outcome::RangeUnsatisfiable:
      case Outcome::Retry: break;
    }
  }
  if (!done) {
    fail(ErrorCode::Fetch, url + " failed after " + std::to_string(options.attempts) + " attempt(s): " + error);
  }
  const auto digest = sha256_file(part);
  if (!expected.empty() && digest != expected) {
    std::filesystem::remove(part, ec);
    fail(ErrorCode::Integrity, url + " has sha256 " + digest + ", expected " + expected);
  }
  std::filesystem::rename(part, dest, ec);
  if (ec) fail(ErrorCode::Io, "cannot move download into " + dest.string() + ": " + ec.message());
  return digest;
}

CheckpointSet fetch_models(const ExperimentConfig& config, const FetchOptions& options) {
  DigestCache digests(config.cache_dir / "digests.json");
  CheckpointSet set;
  for (const auto& r : config.roster) {
    const bool need_base = config.mode != Mode::Adapted || !r.adapted.empty();
    if (need_base && !r.checkpoint.empty()) {
      auto c = resolve(config, r.checkpoint, r.language, digests, options);
      set.downloads += c.downloaded ? 1 : 0;
      set.base.emplace(r.language, std::move(c));
    }
    if (config.mode == Mode::Adapted && !r.adapted.empty()) {
      auto c = resolve(config, r.adapted, r.language + " (adapted)", digests, options);
      set.downloads += c.downloaded ? 1 : 0;
      set.adapted.emplace(r.language, std::move(c));
    }
  }
  return set;
}

}  // namespace typosim
