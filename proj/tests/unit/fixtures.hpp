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
#include <string>
#include <vector>

#include "runner/config.hpp"
#include "weights/tensor_container.hpp"

namespace typosim::testing {

// Fresh empty directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

struct ModelSpec {
  int hidden = 8;
  int layers = 12;
  std::uint64_t seed = 1;
  std::string prefix;               // e.g. "bert."
  bool dense_transposed = false;    // DI stored (h, 4h) and DO (4h, h)
  int swap_di_layer = -1;           // store DI of this layer in the other orientation
  bool raw_format = false;
  std::vector<std::string> omit;    // tensor names to leave out
  std::string nan_tensor;           // tensor that receives one NaN
  // Optional shared component mixed into every matrix, to create structure
  // across models: w = base(seed) + mix * base(shared_seed).
  double mix = 0.0;
  std::uint64_t shared_seed = 0;
};

// BERT-style checkpoint with the six weight matrices per layer plus bias,
// layer-norm and embedding tensors.
std::vector<TensorData> make_model_tensors(const ModelSpec& spec);
void write_model(const std::filesystem::path& path, const ModelSpec& spec);

// Three-model full-mode config over ita, eng, spa with synthetic checkpoints.
ExperimentConfig synthetic_config(const std::filesystem::path& dir, std::size_t parallelism, int hidden = 16);

std::string read_file(const std::filesystem::path& path);

}  // namespace typosim::testing
