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

#include "weights/tensor_container.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "error.hpp"

static_assert(std::endian::native == std::endian::little, "tensor decoding assumes a little-endian host");

namespace typosim {
namespace {

constexpr std::string_view kRawMagic = "TSRAW1\n";
constexpr std::uint64_t kMaxHeaderBytes = 100ULL << 20;

struct DTypeEntry {
  DType dtype;
  std::string_view name;
  std::size_t size;
};

constexpr DTypeEntry kDTypes[] = {
    {DType::F64, "F64", 8},      {DType::F32, "F32", 4},      {DType::F16, "F16", 2},
    {DType::BF16, "BF16", 2},    {DType::I64, "I64", 8},      {DType::I32, "I32", 4},
    {DType::I16, "I16", 2},      {DType::I8, "I8", 1},        {DType::U64, "U64", 8},
    {DType::U32, "U32", 4},      {DType::U16, "U16", 2},      {DType::U8, "U8", 1},
    {DType::Bool, "BOOL", 1},    {DType::F8E4M3, "F8_E4M3", 1}, {DType::F8E5M2, "F8_E5M2", 1},
};

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
  fail(ErrorCode::CorruptContainer, path.string() + ": " + what);
}

std::uint64_t checked_byte_size(const TensorInfo& t, const std::filesystem::path& path) {
  std::uint64_t count = 1;
  for (auto d : t.shape) {
    if (d < 0) corrupt(path, "negative dimension in '" + t.name + "'");
    const auto ud = static_cast<std::uint64_t>(d);
    if (ud != 0 && count > (UINT64_MAX / 8) / ud) corrupt(path, "shape overflow in '" + t.name + "'");
    count *= ud;
  }
  return count * dtype_size(t.dtype);
}

void validate_ranges(std::map<std::string, TensorInfo>& tensors, std::size_t payload_size,
                     const std::filesystem::path& path) {
  std::vector<const TensorInfo*> by_offset;
  for (auto& [name, t] : tensors) {
    if (t.end < t.begin || t.end > payload_size) {
      corrupt(path, "tensor '" + name + "' byte range [" + std::to_string(t.begin) + ", " +
                        std::to_string(t.end) + ") outside payload of " + std::to_string(payload_size));
    }
    const auto expected = checked_byte_size(t, path);
    if (t.end - t.begin != expected) {
      corrupt(path, "tensor '" + name + "' holds " + std::to_string(t.end - t.begin) +
                        " bytes, dtype x shape needs " + std::to_string(expected));
    }
    by_offset.push_back(&t);
  }
  std::sort(by_offset.begin(), by_offset.end(),
            [](const TensorInfo* a, const TensorInfo* b) { return a->begin < b->begin; });
  for (std::size_t i = 1; i < by_offset.size(); ++i) {
    if (by_offset[i]->begin < by_offset[i - 1]->end) {
      corrupt(path, "tensors '" + by_offset[i - 1]->name + "' and '" + by_offset[i]->name + "' overlap");
    }
  }
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  std::uint32_t exp = (h >> 10) & 0x1fu;
  std::uint32_t mant = h & 0x3ffu;
  std::uint32_t bits = 0;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      // subnormal: renormalize
      exp = 127 - 15 + 1;
      while ((mant & 0x400u) == 0) {
        mant <<= 1;
        --exp;
      }
      mant &= 0x3ffu;
      bits = sign | (exp << 23) | (mant << 13);
    }
  } else if (exp == 0x1f) {
    bits = sign | 0x7f800000u | (mant << 13);
  } else {
    bits = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(bits);
}

template <typename T>
T load_le(const std::byte* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

void append_bytes(std::string& out, const void* data, std::size_t size) {
  out.append(static_cast<const char*>(data), size);
}

}  // namespace

std::size_t dtype_size(DType dtype) noexcept {
  for (const auto& e : kDTypes) {
    if (e.dtype == dtype) return e.size;
  }
  return 0;
}

std::string_view dtype_name(DType dtype) noexcept {
  for (const auto& e : kDTypes) {
    if (e.dtype == dtype) return e.name;
  }
  return "?";
}

DType parse_dtype(std::string_view text) {
  for (const auto& e : kDTypes) {
    if (e.name == text) return e.dtype;
  }
  fail(ErrorCode::CorruptContainer, "unknown dtype '" + std::string(text) + "'");
}

bool is_float(DType dtype) noexcept {
  return dtype == DType::F64 || dtype == DType::F32 || dtype == DType::F16 || dtype == DType::BF16;
}

std::uint64_t TensorInfo::element_count() const noexcept {
  std::uint64_t count = 1;
  for (auto d : shape) count *= static_cast<std::uint64_t>(d);
  return count;
}

MappedFile::MappedFile(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) fail(ErrorCode::Io, "cannot open " + path.string() + ": " + std::strerror(errno));
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    fail(ErrorCode::Io, "cannot stat " + path.string());
  }
  size_ = static_cast<std::size_t>(st.st_size);
  if (size_ > 0) {
    void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (p == MAP_FAILED) {
      ::close(fd);
      fail(ErrorCode::Io, "cannot map " + path.string() + ": " + std::strerror(errno));
    }
    data_ = static_cast<const std::byte*>(p);
  }
  ::close(fd);
}

MappedFile::~MappedFile() {
  if (data_ != nullptr) ::munmap(const_cast<std::byte*>(data_), size_);
}

TensorContainer TensorContainer::open(const std::filesystem::path& path) {
  TensorContainer c;
  c.path_ = path;
  c.file_ = std::make_shared<const MappedFile>(path);
  const auto bytes = c.file_->bytes();

  const bool raw = bytes.size() >= kRawMagic.size() &&
                   std::memcmp(bytes.data(), kRawMagic.data(), kRawMagic.size()) == 0;
  if (raw) {
    c.format_ = ContainerFormat::Raw;
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const auto end_marker = text.find("\nEND\n");
    if (end_marker == std::string_view::npos) corrupt(path, "raw header has no END line");
    std::istringstream header(std::string(text.substr(kRawMagic.size(), end_marker + 1 - kRawMagic.size())));
    std::uint64_t offset = 0;
    std::string line;
    while (std::getline(header, line)) {
      if (line.empty()) continue;
      std::istringstream fields(line);
      TensorInfo t;
      std::string dtype;
      if (!(fields >> t.name >> dtype)) corrupt(path, "bad raw header line '" + line + "'");
      t.dtype = parse_dtype(dtype);
      if (t.dtype != DType::F32) corrupt(path, "raw containers hold F32 only");
      std::int64_t d = 0;
      while (fields >> d) t.shape.push_back(d);
      if (!fields.eof()) corrupt(path, "bad shape in raw header line '" + line + "'");
      t.begin = offset;
      t.end = offset + checked_byte_size(t, path);
      offset = t.end;
      if (!c.tensors_.emplace(t.name, t).second) corrupt(path, "duplicate tensor '" + t.name + "'");
    }
    c.payload_offset_ = end_marker + 5;
    c.payload_size_ = bytes.size() - c.payload_offset_;
    if (offset != c.payload_size_) {
      corrupt(path, "payload holds " + std::to_string(c.payload_size_) + " bytes, header declares " +
                        std::to_string(offset));
    }
  } else {
    if (bytes.size() < 8) corrupt(path, "file too short for a header length");
    const auto header_len = load_le<std::uint64_t>(bytes.data());
    if (header_len > kMaxHeaderBytes || header_len > bytes.size() - 8) {
      corrupt(path, "header length " + std::to_string(header_len) + " exceeds file size " +
                        std::to_string(bytes.size()));
    }
    const std::string_view header_text(reinterpret_cast<const char*>(bytes.data() + 8), header_len);
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
      corrupt(path, std::string("header is not valid JSON: ") + e.what());
    }
    if (!header.is_object()) corrupt(path, "header is not a JSON object");
    try {
      for (const auto& [name, entry] : header.items()) {
        if (name == "__metadata__") {
          for (const auto& [k, v] : entry.items()) {
            c.metadata_[k] = v.is_string() ? v.get<std::string>() : v.dump();
          }
          continue;
        }
        TensorInfo t;
        t.name = name;
        t.dtype = parse_dtype(entry.at("dtype").get<std::string>());
        t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
        const auto offsets = entry.at("data_offsets").get<std::vector<std::uint64_t>>();
        if (offsets.size() != 2) corrupt(path, "data_offsets of '" + name + "' must have 2 entries");
        t.begin = offsets[0];
        t.end = offsets[1];
        c.tensors_.emplace(name, std::move(t));
      }
    } catch (const nlohmann::json::exception& e) {
      corrupt(path, std::string("malformed tensor entry: ") + e.what());
    }
    c.payload_offset_ = 8 + header_len;
    c.payload_size_ = bytes.size() - c.payload_offset_;
  }
  validate_ranges(c.tensors_, c.payload_size_, path);
  return c;
}

const TensorInfo& TensorContainer::info(const std::string& name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    fail(ErrorCode::LayoutMismatch, path_.string() + " has no tensor '" + name + "'");
  }
  return it->second;
}

std::span<const std::byte> TensorContainer::raw(const TensorInfo& t) const {
  return file_->bytes().subspan(payload_offset_ + t.begin, t.end - t.begin);
}

std::vector<double> decode_to_double(std::span<const std::byte> raw, DType dtype) {
  if (!is_float(dtype)) {
    fail(ErrorCode::InvalidArgument, "cannot decode " + std::string(dtype_name(dtype)) + " as floats");
  }
  const std::size_t width = dtype_size(dtype);
  const std::size_t count = raw.size() / width;
  std::vector<double> out(count);
  const std::byte* p = raw.data();
  switch (dtype) {
    case DType::F64:
      for (std::size_t i = 0; i < count; ++i) out[i] = load_le<double>(p + 8 * i);
      break;
    case DType::F32:
      for (std::size_t i = 0; i < count; ++i) out[i] = load_le<float>(p + 4 * i);
      break;
    case DType::F16:
      for (std::size_t i = 0; i < count; ++i) out[i] = half_to_float(load_le<std::uint16_t>(p + 2 * i));
      break;
    case DType::BF16:
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(load_le<std::uint16_t>(p + 2 * i)) << 16;
        out[i] = std::bit_cast<float>(bits);
      }
      break;
    default:
      break;
  }
  return out;
}

void write_safetensors(const std::filesystem::path& path, std::span<const TensorData> tensors,
                       const std::map<std::string, std::string>& metadata) {
  nlohmann::json header = nlohmann::json::object();
  if (!metadata.empty()) header["__metadata__"] = metadata;
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    const std::uint64_t bytes = t.values.size() * sizeof(float);
    header[t.name] = {{"dtype", "F32"}, {"shape", t.shape}, {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string text = header.dump();
  while (text.size() % 8 != 0) text.push_back(' ');
  std::string blob;
  const std::uint64_t len = text.size();
  append_bytes(blob, &len, sizeof(len));
  blob += text;
  for (const auto& t : tensors) append_bytes(blob, t.values.data(), t.values.size() * sizeof(float));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

void write_raw_container(const std::filesystem::path& path, std::span<const TensorData> tensors) {
  std::string blob(kRawMagic);
  for (const auto& t : tensors) {
    blob += t.name + " F32";
    for (auto d : t.shape) blob += " " + std::to_string(d);
    blob += "\n";
  }
  blob += "END\n";
  for (const auto& t : tensors) append_bytes(blob, t.values.data(), t.values.size() * sizeof(float));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace typosim
