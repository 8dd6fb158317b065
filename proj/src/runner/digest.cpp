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

#include "runner/digest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "error.hpp"

namespace typosim {
namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      fail(ErrorCode::Internal, "sha256 init failed");
    }
  }
  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) fail(ErrorCode::Internal, "sha256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) fail(ErrorCode::Internal, "sha256 final failed");
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(buf, sizeof buf, "%02x", md[i]);
      out += buf;
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

long long mtime_of(const std::filesystem::path& p) {
  return static_cast<long long>(std::filesystem::last_write_time(p).time_since_epoch().count());
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) fail(ErrorCode::Io, "read error on " + path.string());
  return h.hex();
}

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

DigestCache::DigestCache(std::filesystem::path store) : store_(std::move(store)) {
  std::ifstream in(store_);
  if (!in) return;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [path, e] : j.items()) {
      entries_[path] = {e.at("size").get<std::uintmax_t>(), e.at("mtime").get<long long>(),
                        e.at("sha256").get<std::string>()};
    }
  } catch (const nlohmann::json::exception&) {
    entries_.clear();  // unreadable memo: rehash everything
  }
}

std::string DigestCache::digest(const std::filesystem::path& file) {
  const auto key = std::filesystem::absolute(file).lexically_normal().string();
  std::error_code ec;
  const auto size = std::filesystem::file_size(file, ec);
  if (ec) fail(ErrorCode::Io, "cannot stat " + file.string() + ": " + ec.message());
  const auto mtime = mtime_of(file);
  {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end() && it->second.size == size && it->second.mtime == mtime) return it->second.digest;
  }
  auto d = sha256_file(file);
  record(file, d);
  return d;
}

void DigestCache::record(const std::filesystem::path& file, const std::string& digest) {
  const auto key = std::filesystem::absolute(file).lexically_normal().string();
  std::lock_guard lock(mutex_);
  entries_[key] = {std::filesystem::file_size(file), mtime_of(file), digest};
  save();
}

void DigestCache::save() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [path, e] : entries_) j[path] = {{"size", e.size}, {"mtime", e.mtime}, {"sha256", e.digest}};
  std::error_code ec;
  std::filesystem::create_directories(store_.parent_path(), ec);
  const auto tmp = store_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return;  // memo is best-effort
    out << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, store_, ec);
}

}  // namespace typosim
