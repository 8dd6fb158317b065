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

#include "weights/layout.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace typosim {
namespace {

std::string substitute(std::string text, std::string_view key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

std::string expand(const std::string& tmpl, const std::string& prefix, int layer) {
  return substitute(substitute(tmpl, "{prefix}", prefix), "{L}", std::to_string(layer));
}

std::string shape_text(const std::vector<std::int64_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

}  // namespace

LayoutConfig default_layout() {
  LayoutConfig c;
  const std::string base = "{prefix}encoder.layer.{L}.";
  c.templates[kind_index(MatrixKind::Q)] = base + "attention.self.query.weight";
  c.templates[kind_index(MatrixKind::K)] = base + "attention.self.key.weight";
  c.templates[kind_index(MatrixKind::V)] = base + "attention.self.value.weight";
  c.templates[kind_index(MatrixKind::OA)] = base + "attention.output.dense.weight";
  c.templates[kind_index(MatrixKind::DI)] = base + "intermediate.dense.weight";
  c.templates[kind_index(MatrixKind::DO)] = base + "output.dense.weight";
  return c;
}

LayoutConfig parse_layout_config(const std::string& json_text) {
  LayoutConfig c = default_layout();
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.name = j.value("name", c.name);
    c.prefix_candidates = j.value("prefix_candidates", c.prefix_candidates);
    c.layer_count = j.value("layer_count", c.layer_count);
    if (j.contains("templates")) {
      for (const auto& [key, value] : j.at("templates").items()) {
        c.templates[kind_index(parse_kind(key))] = value.get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("layout config: ") + e.what());
  }
  if (c.layer_count <= 0) fail(ErrorCode::Config, "layout config: layer_count must be positive");
  if (c.prefix_candidates.empty()) c.prefix_candidates.emplace_back();
  for (auto kind : kAllKinds) {
    const auto& t = c.templates[kind_index(kind)];
    if (t.find("{L}") == std::string::npos) {
      fail(ErrorCode::Config, "layout template for " + std::string(kind_name(kind)) + " lacks {L}");
    }
  }
  return c;
}

LayoutConfig load_layout_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read layout config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_layout_config(buf.str());
}

std::string layout_config_json(const LayoutConfig& config) {
  nlohmann::ordered_json j;
  j["name"] = config.name;
  j["prefix_candidates"] = config.prefix_candidates;
  j["layer_count"] = config.layer_count;
  for (auto kind : kAllKinds) j["templates"][std::string(kind_name(kind))] = config.templates[kind_index(kind)];
  return j.dump(2);
}

std::string LayoutMap::tensor_name(MatrixKind kind, int layer) const {
  return expand(templates[kind_index(kind)], prefix, layer);
}

LayoutMap resolve_layout(const LayoutConfig& config, const TensorContainer& container) {
  std::vector<std::string> best_missing;
  std::size_t best_found = 0;
  bool have_best = false;
  for (const auto& prefix : config.prefix_candidates) {
    LayoutMap map{config.name, prefix, config.layer_count, config.templates};
    std::vector<std::string> missing;
    std::size_t found = 0;
    for (int layer = 0; layer < config.layer_count; ++layer) {
      for (auto kind : kAllKinds) {
        auto name = map.tensor_name(kind, layer);
        if (container.contains(name)) {
          ++found;
        } else {
          missing.push_back(std::move(name));
        }
      }
    }
    if (missing.empty()) return map;
    if (!have_best || found > best_found) {
      best_missing = std::move(missing);
      best_found = found;
      have_best = true;
    }
  }
  std::string msg = container.path().string() + ": layout '" + config.name + "' unresolved, " +
                    std::to_string(best_missing.size()) + " tensor(s) missing:";
  constexpr std::size_t kShown = 24;
  for (std::size_t i = 0; i < best_missing.size() && i < kShown; ++i) msg += " " + best_missing[i];
  if (best_missing.size() > kShown) msg += " ...";
  fail(ErrorCode::LayoutMismatch, msg);
}

WeightMatrix extract(const TensorContainer& container, const LayoutMap& layout, int layer, MatrixKind kind,
                     const std::string& language) {
  if (layer < 0 || layer >= layout.layer_count) {
    fail(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " outside 0.." +
                                         std::to_string(layout.layer_count - 1));
  }
  const auto name = layout.tensor_name(kind, layer);
  const auto& info = container.info(name);
  if (info.shape.size() != 2) {
    fail(ErrorCode::BadTensorRank, name + " has rank " + std::to_string(info.shape.size()) + ", expected 2");
  }
  const auto values = decode_to_double(container.raw(info), info.dtype);
  const Eigen::Index rows = info.shape[0];
  const Eigen::Index cols = info.shape[1];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::NonFiniteWeights, name + " in " + container.path().string() + " has a non-finite entry at (" +
                                            std::to_string(i / cols) + ", " + std::to_string(i % cols) + ")");
    }
  }
  WeightMatrix m;
  m.language = language;
  m.layer = layer;
  m.kind = kind;
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  m.data = Eigen::Map<const RowMajor>(values.data(), rows, cols);
  return m;
}

std::string ArchitectureReport::to_json() const {
  nlohmann::ordered_json j;
  j["hidden_size"] = hidden_size;
  j["intermediate_size"] = intermediate_size;
  j["layer_count"] = layer_count;
  j["ok"] = ok;
  for (auto kind : kAllKinds) {
    auto& arr = j["shapes"][std::string(kind_name(kind))];
    arr = nlohmann::json::array();
    for (const auto& s : shapes[kind_index(kind)]) arr.push_back({s[0], s[1]});
  }
  return j.dump();
}

ArchitectureReport validate_model(const TensorContainer& container, const LayoutMap& layout, int expected_layers) {
  const auto where = container.path().string() + ": ";
  if (layout.layer_count != expected_layers) {
    fail(ErrorCode::ArchitectureMismatch, where + "model has " + std::to_string(layout.layer_count) +
                                              " layers, " + std::to_string(expected_layers) + " required");
  }
  for (auto kind : kAllKinds) {
    if (container.contains(layout.tensor_name(kind, layout.layer_count))) {
      fail(ErrorCode::ArchitectureMismatch, where + "model has more than " + std::to_string(expected_layers) +
                                                " layers (found " + layout.tensor_name(kind, layout.layer_count) + ")");
    }
  }

  ArchitectureReport report;
  report.layer_count = layout.layer_count;
  for (int layer = 0; layer < layout.layer_count; ++layer) {
    for (auto kind : kAllKinds) {
      const auto name = layout.tensor_name(kind, layer);
      const auto& info = container.info(name);
      if (info.shape.size() != 2) {
        fail(ErrorCode::BadTensorRank, where + name + " has shape " + shape_text(info.shape));
      }
      if (!is_float(info.dtype)) {
        fail(ErrorCode::ArchitectureMismatch, where + name + " has non-float dtype " +
                                                  std::string(dtype_name(info.dtype)));
      }
      report.shapes[kind_index(kind)].push_back({info.shape[0], info.shape[1]});
    }
  }

  const auto& q0 = report.shapes[kind_index(MatrixKind::Q)][0];
  const std::int64_t h = q0[0];
  for (auto kind : {MatrixKind::Q, MatrixKind::K, MatrixKind::V, MatrixKind::OA}) {
    for (int layer = 0; layer < layout.layer_count; ++layer) {
      const auto& s = report.shapes[kind_index(kind)][static_cast<std::size_t>(layer)];
      if (s[0] != h || s[1] != h) {
        fail(ErrorCode::ArchitectureMismatch,
             where + layout.tensor_name(kind, layer) + " is (" + std::to_string(s[0]) + ", " +
                 std::to_string(s[1]) + "), expected (" + std::to_string(h) + ", " + std::to_string(h) + ")");
      }
    }
  }
  for (auto kind : {MatrixKind::DI, MatrixKind::DO}) {
    const auto& first = report.shapes[kind_index(kind)][0];
    const bool tall = first[0] == 4 * h && first[1] == h;
    const bool wide = first[0] == h && first[1] == 4 * h;
    if (!tall && !wide) {
      fail(ErrorCode::ArchitectureMismatch, where + layout.tensor_name(kind, 0) + " is (" +
                                                std::to_string(first[0]) + ", " + std::to_string(first[1]) +
                                                "), expected (4h, h) or (h, 4h) with h = " + std::to_string(h));
    }
    for (int layer = 1; layer < layout.layer_count; ++layer) {
      const auto& s = report.shapes[kind_index(kind)][static_cast<std::size_t>(layer)];
      if (s != first) {
        fail(ErrorCode::ArchitectureMismatch,
             where + layout.tensor_name(kind, layer) + " is (" + std::to_string(s[0]) + ", " +
                 std::to_string(s[1]) + ") but layer 0 stores (" + std::to_string(first[0]) + ", " +
                 std::to_string(first[1]) + ")");
      }
    }
  }
  report.hidden_size = h;
  report.intermediate_size = 4 * h;
  report.ok = true;
  return report;
}

void check_comparable(const ArchitectureReport& a, const std::string& name_a, const ArchitectureReport& b,
                      const std::string& name_b) {
  if (a.hidden_size != b.hidden_size || a.intermediate_size != b.intermediate_size ||
      a.layer_count != b.layer_count) {
    fail(ErrorCode::ArchitectureMismatch,
         name_a + " (h=" + std::to_string(a.hidden_size) + ", layers=" + std::to_string(a.layer_count) +
             ") is not comparable with " + name_b + " (h=" + std::to_string(b.hidden_size) +
             ", layers=" + std::to_string(b.layer_count) + ")");
  }
}

}  // namespace typosim
