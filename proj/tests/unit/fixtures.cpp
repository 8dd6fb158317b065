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

#include "unit/fixtures.hpp"

#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#ifndef TYPOSIM_TEST_BUILD_DIR
#define TYPOSIM_TEST_BUILD_DIR "."
#endif

namespace typosim::testing {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(TYPOSIM_TEST_BUILD_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

std::vector<float> gaussian(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.05);
  std::vector<float> out(count);
  for (auto& v : out) v = static_cast<float>(dist(rng));
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + salt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<TensorData> make_model_tensors(const ModelSpec& spec) {
  const std::int64_t h = spec.hidden;
  const std::int64_t f = 4 * h;
  std::vector<TensorData> out;
  std::uint64_t salt = 0;
  auto add = [&](const std::string& name, std::vector<std::int64_t> shape) {
    ++salt;
    for (const auto& o : spec.omit) {
      if (o == name) return;
    }
    std::size_t count = 1;
    for (auto d : shape) count *= static_cast<std::size_t>(d);
    auto values = gaussian(count, mix_seed(spec.seed, salt));
    if (spec.mix != 0.0) {
      const auto shared = gaussian(count, mix_seed(spec.shared_seed, salt));
      for (std::size_t i = 0; i < count; ++i) values[i] += static_cast<float>(spec.mix) * shared[i];
    }
    if (name == spec.nan_tensor) values[count / 2] = std::numeric_limits<float>::quiet_NaN();
    out.push_back({name, std::move(shape), std::move(values)});
  };
  const auto& p = spec.prefix;
  add(p + "embeddings.word_embeddings.weight", {50, h});
  add(p + "embeddings.LayerNorm.weight", {h});
  for (int l = 0; l < spec.layers; ++l) {
    const auto base = p + "encoder.layer." + std::to_string(l) + ".";
    add(base + "attention.self.query.weight", {h, h});
    add(base + "attention.self.query.bias", {h});
    add(base + "attention.self.key.weight", {h, h});
    add(base + "attention.self.key.bias", {h});
    add(base + "attention.self.value.weight", {h, h});
    add(base + "attention.self.value.bias", {h});
    add(base + "attention.output.dense.weight", {h, h});
    add(base + "attention.output.dense.bias", {h});
    add(base + "attention.output.LayerNorm.weight", {h});
    const bool t = spec.dense_transposed != (l == spec.swap_di_layer);
    add(base + "intermediate.dense.weight", t ? std::vector<std::int64_t>{h, f} : std::vector<std::int64_t>{f, h});
    add(base + "intermediate.dense.bias", {f});
    add(base + "output.dense.weight",
        spec.dense_transposed ? std::vector<std::int64_t>{f, h} : std::vector<std::int64_t>{h, f});
    add(base + "output.dense.bias", {h});
  }
  return out;
}

void write_model(const std::filesystem::path& path, const ModelSpec& spec) {
  const auto tensors = make_model_tensors(spec);
  if (spec.raw_format) {
    write_raw_container(path, tensors);
  } else {
    write_safetensors(path, tensors, {{"format", "pt"}});
  }
}

ExperimentConfig synthetic_config(const std::filesystem::path& dir, std::size_t parallelism, int hidden) {
  ExperimentConfig c;
  const auto data = bundled_data_dir();
  c.syntactic_table = data / "wals_syntactic.tsv";
  c.morphological_table = data / "wals_morphological.tsv";
  const char* langs[] = {"ita", "eng", "spa"};
  for (int i = 0; i < 3; ++i) {
    const auto path = dir / (std::string(langs[i]) + ".safetensors");
    if (!std::filesystem::exists(path)) {
      ModelSpec spec;
      spec.hidden = hidden;
      spec.seed = 100 + static_cast<std::uint64_t>(i);
      spec.mix = i == 1 ? 0.5 : 1.0;
      spec.shared_seed = 7;
      write_model(path, spec);
    }
    RosterEntry r;
    r.language = langs[i];
    r.checkpoint.location = path.string();
    c.roster.push_back(r);
  }
  c.parallelism = parallelism;
  c.cache_dir = dir / ("cache-p" + std::to_string(parallelism));
  c.output_dir = dir / ("out-p" + std::to_string(parallelism));
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace typosim::testing
