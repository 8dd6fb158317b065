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
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace typosim {

enum class DType { F64, F32, F16, BF16, I64, I32, I16, I8, U64, U32, U16, U8, Bool, F8E4M3, F8E5M2 };

std::size_t dtype_size(DType dtype) noexcept;
std::string_view dtype_name(DType dtype) noexcept;
DType parse_dtype(std::string_view text);
bool is_float(DType dtype) noexcept;

struct TensorInfo {
  std::string name;
  DType dtype = DType::F32;
  std::vector<std::int64_t> shape;
  std::uint64_t begin = 0;  // byte offsets relative to the payload start
  std::uint64_t end = 0;

  std::uint64_t element_count() const noexcept;
};

// Read-only memory mapping of a whole file.
class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path);
  ~MappedFile();
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::span<const std::byte> bytes() const noexcept { return {data_, size_}; }

 private:
  const std::byte* data_ = nullptr;
  std::size_t size_ = 0;
};

enum class ContainerFormat { SafeTensors, Raw };

/// A parsed checkpoint. Opening validates the header and maps the payload; no
/// tensor data is copied until a tensor is decoded. Immutable after open, so
/// concurrent reads are safe.
class TensorContainer {
 public:
  static TensorContainer open(const std::filesystem::path& path);

  const std::filesystem::path& path() const noexcept { return path_; }
  ContainerFormat format() const noexcept { return format_; }
  const std::map<std::string, TensorInfo>& tensors() const noexcept { return tensors_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const TensorInfo& info(const std::string& name) const;
  std::span<const std::byte> raw(const TensorInfo& info) const;

 private:
  TensorContainer() = default;

  std::filesystem::path path_;
  ContainerFormat format_ = ContainerFormat::SafeTensors;
  std::shared_ptr<const MappedFile> file_;
  std::size_t payload_offset_ = 0;
  std::size_t payload_size_ = 0;
  std::map<std::string, TensorInfo> tensors_;
  std::map<std::string, std::string> metadata_;
};

/// Decodes a float tensor (F64/F32/F16/BF16, little-endian) to doubles in
/// stored (row-major) order.
std::vector<double> decode_to_double(std::span<const std::byte> raw, DType dtype);

struct TensorData {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> values;  // row-major
};

// Writers used to build fixtures: safetensors (F32) and the raw TSRAW1 format.
void write_safetensors(const std::filesystem::path& path, std::span<const TensorData> tensors,
                       const std::map<std::string, std::string>& metadata = {});
void write_raw_container(const std::filesystem::path& path, std::span<const TensorData> tensors);

}  // namespace typosim
