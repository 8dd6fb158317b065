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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "unit/fixtures.hpp"
#include "weights/layout.hpp"
#include "weights/tensor_container.hpp"

using namespace typosim;
using namespace typosim::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Hand-assembled safetensors file: u64 LE header length, header text, payload.
void write_bytes(const std::filesystem::path& path, const std::string& header, std::size_t payload_bytes,
                 std::uint64_t declared_length = 0) {
  std::ofstream out(path, std::ios::binary);
  std::uint64_t n = declared_length != 0 ? declared_length : header.size();
  unsigned char len[8];
  for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(n >> (8 * i));
  out.write(reinterpret_cast<const char*>(len), 8);
  out << header;
  out << std::string(payload_bytes, '\0');
}

std::vector<std::byte> le_bytes(std::initializer_list<std::uint16_t> halves) {
  std::vector<std::byte> out;
  for (auto h : halves) {
    out.push_back(std::byte(h & 0xff));
    out.push_back(std::byte(h >> 8));
  }
  return out;
}

}  // namespace

TEST_SUITE("weights") {
  TEST_CASE("container with two tensors") {
    const auto dir = scratch_dir("weights-two");
    const std::vector<TensorData> tensors{{"a", {2, 3}, {1, 2, 3, 4, 5, 6}}, {"b", {4}, {7, 8, 9, 10}}};
    write_safetensors(dir / "two.safetensors", tensors, {{"format", "pt"}});
    const auto c = TensorContainer::open(dir / "two.safetensors");
    CHECK(c.format() == ContainerFormat::SafeTensors);
    REQUIRE(c.tensors().size() == 2);
    CHECK(c.info("a").shape == std::vector<std::int64_t>{2, 3});
    CHECK(c.info("b").shape == std::vector<std::int64_t>{4});
    CHECK(c.info("a").dtype == DType::F32);
    CHECK(c.metadata().at("format") == "pt");
    const auto values = decode_to_double(c.raw(c.info("a")), DType::F32);
    CHECK(values == std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(code_of([&] { c.info("missing"); }) == ErrorCode::LayoutMismatch);

    write_raw_container(dir / "two.raw", tensors);
    const auto r = TensorContainer::open(dir / "two.raw");
    CHECK(r.format() == ContainerFormat::Raw);
    CHECK(decode_to_double(r.raw(r.info("b")), DType::F32) == std::vector<double>{7, 8, 9, 10});
  }

  TEST_CASE("corrupt containers") {
    const auto dir = scratch_dir("weights-corrupt");
    const std::string ok = R"({"t":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}})";
    write_bytes(dir / "ok.st", ok, 16);
    CHECK_NOTHROW(TensorContainer::open(dir / "ok.st"));

    write_bytes(dir / "long.st", ok, 16, 1 << 20);
    CHECK(code_of([&] { TensorContainer::open(dir / "long.st"); }) == ErrorCode::CorruptContainer);

    // declared (768, 768) F32 but four bytes short
    const std::string big = R"({"t":{"dtype":"F32","shape":[768,768],"data_offsets":[0,2359292]}})";
    write_bytes(dir / "short.st", big, 2359292);
    CHECK(code_of([&] { TensorContainer::open(dir / "short.st"); }) == ErrorCode::CorruptContainer);

    const std::string past = R"({"t":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}})";
    write_bytes(dir / "past.st", past, 12);
    CHECK(code_of([&] { TensorContainer::open(dir / "past.st"); }) == ErrorCode::CorruptContainer);

    const std::string overlap =
        R"({"a":{"dtype":"F32","shape":[2],"data_offsets":[0,8]},"b":{"dtype":"F32","shape":[2],"data_offsets":[4,12]}})";
    write_bytes(dir / "overlap.st", overlap, 12);
    CHECK(code_of([&] { TensorContainer::open(dir / "overlap.st"); }) == ErrorCode::CorruptContainer);

    write_bytes(dir / "json.st", "{not json", 0);
    CHECK(code_of([&] { TensorContainer::open(dir / "json.st"); }) == ErrorCode::CorruptContainer);

    { std::ofstream(dir / "tiny.st", std::ios::binary) << "abc"; }
    CHECK(code_of([&] { TensorContainer::open(dir / "tiny.st"); }) == ErrorCode::CorruptContainer);
    { std::ofstream(dir / "empty.st", std::ios::binary); }
    CHECK(code_of([&] { TensorContainer::open(dir / "empty.st"); }) == ErrorCode::CorruptContainer);
    CHECK(code_of([&] { TensorContainer::open(dir / "nope.st"); }) == ErrorCode::Io);

    // raw format with a truncated payload
    const std::vector<TensorData> tensors{{"a", {2, 2}, {1, 2, 3, 4}}};
    write_raw_container(dir / "t.raw", tensors);
    std::filesystem::resize_file(dir / "t.raw", std::filesystem::file_size(dir / "t.raw") - 4);
    CHECK(code_of([&] { TensorContainer::open(dir / "t.raw"); }) == ErrorCode::CorruptContainer);
  }

  TEST_CASE("half precision decoding") {
    const auto f16 = decode_to_double(le_bytes({0x3C00, 0xC000, 0x7BFF, 0x0001, 0x0000, 0x8000, 0x3555}), DType::F16);
    CHECK(f16[0] == 1.0);
    CHECK(f16[1] == -2.0);
    CHECK(f16[2] == 65504.0);
    CHECK(f16[3] == std::ldexp(1.0, -24));
    CHECK(f16[4] == 0.0);
    CHECK(std::signbit(f16[5]));
    CHECK(f16[6] == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    const auto inf = decode_to_double(le_bytes({0x7C00}), DType::F16);
    CHECK(std::isinf(inf[0]));

    const auto bf16 = decode_to_double(le_bytes({0x3F80, 0xC040, 0x4049}), DType::BF16);
    CHECK(bf16[0] == 1.0);
    CHECK(bf16[1] == -3.0);
    CHECK(bf16[2] == doctest::Approx(3.140625).epsilon(1e-12));

    double d = 0.1;
    std::vector<std::byte> raw(8);
    std::memcpy(raw.data(), &d, 8);
    CHECK(decode_to_double(raw, DType::F64)[0] == 0.1);
    CHECK(code_of([&] { decode_to_double(raw, DType::I32); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("layout resolves 72 names") {
    const auto dir = scratch_dir("weights-layout");
    write_model(dir / "m.safetensors", {.hidden = 8});
    const auto c = TensorContainer::open(dir / "m.safetensors");
    const auto layout = resolve_layout(default_layout(), c);
    CHECK(layout.prefix.empty());
    CHECK(layout.layer_count == 12);
    std::set<std::string> names;
    for (int l = 0; l < 12; ++l) {
      for (std::size_t k = 0; k < kKindCount; ++k) {
        const auto name = layout.tensor_name(static_cast<MatrixKind>(k), l);
        CHECK(c.contains(name));
        names.insert(name);
      }
    }
    CHECK(names.size() == 72);
    CHECK(layout.tensor_name(MatrixKind::V, 5) == "encoder.layer.5.attention.self.value.weight");

    const auto bundled = load_layout_config(bundled_data_dir() / "layouts" / "bert.json");
    CHECK(resolve_layout(bundled, c).tensor_name(MatrixKind::DI, 0) == "encoder.layer.0.intermediate.dense.weight");
    CHECK(parse_layout_config(layout_config_json(bundled)).templates == bundled.templates);
    CHECK(code_of([] { parse_layout_config("{\"templates\": {\"Q\": \"x\"}}"); }) == ErrorCode::Config);
  }

  TEST_CASE("missing layer-11 value weight") {
    const auto dir = scratch_dir("weights-missing");
    write_model(dir / "m.safetensors", {.omit = {"encoder.layer.11.attention.self.value.weight"}});
    const auto c = TensorContainer::open(dir / "m.safetensors");
    const auto message = error_of([&] { resolve_layout(default_layout(), c); });
    CHECK(code_of([&] { resolve_layout(default_layout(), c); }) == ErrorCode::LayoutMismatch);
    CHECK(message.find("encoder.layer.11.attention.self.value.weight") != std::string::npos);
  }

  TEST_CASE("second prefix candidate") {
    const auto dir = scratch_dir("weights-prefix");
    write_model(dir / "m.safetensors", {.prefix = "bert."});
    const auto c = TensorContainer::open(dir / "m.safetensors");
    const auto layout = resolve_layout(default_layout(), c);
    CHECK(layout.prefix == "bert.");
    CHECK(layout.tensor_name(MatrixKind::Q, 0) == "bert.encoder.layer.0.attention.self.query.weight");
  }

  TEST_CASE("extract") {
    const auto dir = scratch_dir("weights-extract");
    write_model(dir / "m.safetensors", {.hidden = 8, .seed = 3});
    const auto c = TensorContainer::open(dir / "m.safetensors");
    const auto layout = resolve_layout(default_layout(), c);
    const auto v5 = extract(c, layout, 5, MatrixKind::V, "ita");
    CHECK(v5.data.rows() == 8);
    CHECK(v5.data.cols() == 8);
    CHECK(v5.language == "ita");
    const auto di = extract(c, layout, 0, MatrixKind::DI);
    CHECK(di.data.rows() == 32);
    CHECK(di.data.cols() == 8);

    // row-major order preserved
    const auto& info = c.info(layout.tensor_name(MatrixKind::DO, 2));
    const auto flat = decode_to_double(c.raw(info), info.dtype);
    const auto dm = extract(c, layout, 2, MatrixKind::DO).data;
    CHECK(dm(1, 3) == flat[1 * 32 + 3]);
    CHECK(dm(7, 31) == flat[7 * 32 + 31]);

    const auto again = extract(c, layout, 5, MatrixKind::V);
    CHECK(std::memcmp(again.data.data(), v5.data.data(), sizeof(double) * 64) == 0);
    CHECK(code_of([&] { extract(c, layout, 12, MatrixKind::Q); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { extract(c, layout, -1, MatrixKind::Q); }) == ErrorCode::InvalidArgument);

    write_model(dir / "nan.safetensors", {.nan_tensor = "encoder.layer.3.attention.self.key.weight"});
    const auto n = TensorContainer::open(dir / "nan.safetensors");
    const auto nl = resolve_layout(default_layout(), n);
    CHECK(code_of([&] { extract(n, nl, 3, MatrixKind::K); }) == ErrorCode::NonFiniteWeights);
    CHECK_NOTHROW(extract(n, nl, 4, MatrixKind::K));

    // rank 1 tensor mapped as a weight
    auto config = default_layout();
    config.templates[static_cast<std::size_t>(MatrixKind::Q)] = "{prefix}encoder.layer.{L}.attention.self.query.bias";
    const auto bias_layout = resolve_layout(config, c);
    CHECK(code_of([&] { extract(c, bias_layout, 0, MatrixKind::Q); }) == ErrorCode::BadTensorRank);

    write_model(dir / "m.raw", {.hidden = 8, .seed = 3, .raw_format = true});
    const auto r = TensorContainer::open(dir / "m.raw");
    const auto rv5 = extract(r, resolve_layout(default_layout(), r), 5, MatrixKind::V);
    CHECK(rv5.data == v5.data);
  }

  TEST_CASE("validate_model") {
    const auto dir = scratch_dir("weights-validate");
    write_model(dir / "ok.safetensors", {.hidden = 8});
    const auto c = TensorContainer::open(dir / "ok.safetensors");
    const auto layout = resolve_layout(default_layout(), c);
    const auto report = validate_model(c, layout);
    CHECK(report.ok);
    CHECK(report.hidden_size == 8);
    CHECK(report.intermediate_size == 32);
    CHECK(report.layer_count == 12);
    const auto j = nlohmann::json::parse(report.to_json());
    CHECK(j.at("hidden_size") == 8);

    write_model(dir / "t.safetensors", {.hidden = 8, .dense_transposed = true});
    const auto t = TensorContainer::open(dir / "t.safetensors");
    const auto tr = validate_model(t, resolve_layout(default_layout(), t));
    CHECK(tr.ok);
    CHECK_NOTHROW(check_comparable(report, "a", tr, "b"));

    write_model(dir / "six.safetensors", {.hidden = 8, .layers = 6});
    const auto six = TensorContainer::open(dir / "six.safetensors");
    auto six_config = default_layout();
    six_config.layer_count = 6;
    const auto six_layout = resolve_layout(six_config, six);
    CHECK(code_of([&] { validate_model(six, six_layout, 12); }) == ErrorCode::ArchitectureMismatch);
    CHECK(code_of([&] { resolve_layout(default_layout(), six); }) == ErrorCode::LayoutMismatch);

    write_model(dir / "swap.safetensors", {.hidden = 8, .swap_di_layer = 4});
    const auto sw = TensorContainer::open(dir / "swap.safetensors");
    CHECK(code_of([&] { validate_model(sw, resolve_layout(default_layout(), sw)); }) ==
          ErrorCode::ArchitectureMismatch);

    write_model(dir / "h16.safetensors", {.hidden = 16});
    const auto h16 = TensorContainer::open(dir / "h16.safetensors");
    const auto r16 = validate_model(h16, resolve_layout(default_layout(), h16));
    CHECK(code_of([&] { check_comparable(report, "ita", r16, "eng"); }) == ErrorCode::ArchitectureMismatch);
  }
}
