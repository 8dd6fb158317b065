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

#include "runner/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

#ifndef TYPOSIM_DATA_DIR
#define TYPOSIM_DATA_DIR "data"
#endif

namespace typosim {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

CheckpointRef parse_ref(const json& j, const std::filesystem::path& base) {
  CheckpointRef ref;
  if (j.is_string()) {
    ref.location = j.get<std::string>();
  } else {
    ref.location = j.at("location").get<std::string>();
    ref.digest = j.value("digest", std::string());
  }
  std::transform(ref.digest.begin(), ref.digest.end(), ref.digest.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (!ref.is_url() && !ref.location.empty()) ref.location = resolve(base, ref.location).string();
  return ref;
}

json ref_json(const CheckpointRef& ref) {
  if (ref.digest.empty()) return ref.location;
  return json{{"location", ref.location}, {"digest", ref.digest}};
}

// Cluster label -> (area, 1-based index).
std::pair<Area, std::size_t> parse_cluster_label(const std::string& label) {
  if (label.size() >= 2 && (label[0] == 'S' || label[0] == 'M')) {
    const auto digits = label.substr(1);
    if (std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return {label[0] == 'S' ? Area::Syntactic : Area::Morphological, std::stoul(digits)};
    }
  }
  fail(ErrorCode::Config, "bad cluster label '" + label + "' (expected S<n> or M<n>)");
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::Full: return "full";
    case Mode::Focused: return "focused";
    case Mode::Adapted: return "adapted";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "full") return Mode::Full;
  if (text == "focused") return Mode::Focused;
  if (text == "adapted") return Mode::Adapted;
  fail(ErrorCode::Config, "unknown mode '" + std::string(text) + "'");
}

bool CheckpointRef::is_url() const {
  return location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0;
}

std::vector<std::string> ExperimentConfig::languages() const {
  std::vector<std::string> out;
  for (const auto& e : roster) out.push_back(e.language);
  return out;
}

const RosterEntry& ExperimentConfig::entry(std::string_view language) const {
  for (const auto& e : roster) {
    if (e.language == language) return e;
  }
  fail(ErrorCode::Config, "language '" + std::string(language) + "' not in roster");
}

std::size_t ExperimentConfig::cluster_count(Area area) const {
  return area == Area::Syntactic ? syntactic_clusters : morphological_clusters;
}

std::filesystem::path bundled_data_dir() {
  if (const char* env = std::getenv("TYPOSIM_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return TYPOSIM_DATA_DIR;
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.syntactic_table = bundled_data_dir() / "wals_syntactic.tsv";
  c.morphological_table = bundled_data_dir() / "wals_morphological.tsv";
  try {
    const auto j = json::parse(json_text);
    for (const auto& e : j.at("roster")) {
      RosterEntry r;
      r.language = normalize_language_code(e.at("language").get<std::string>());
      if (e.contains("checkpoint")) r.checkpoint = parse_ref(e.at("checkpoint"), base_dir);
      if (e.contains("adapted_checkpoint")) r.adapted = parse_ref(e.at("adapted_checkpoint"), base_dir);
      c.roster.push_back(std::move(r));
    }
    if (j.contains("tables")) {
      const auto& t = j.at("tables");
      if (t.contains("syntactic")) c.syntactic_table = resolve(base_dir, t.at("syntactic").get<std::string>());
      if (t.contains("morphological")) {
        c.morphological_table = resolve(base_dir, t.at("morphological").get<std::string>());
      }
    }
    if (j.contains("layout")) c.layout = resolve(base_dir, j.at("layout").get<std::string>());
    if (j.contains("spaces")) {
      c.spaces.clear();
      for (const auto& s : j.at("spaces")) c.spaces.push_back(parse_area(s.get<std::string>()));
    }
    c.mode = parse_mode(j.value("mode", std::string("full")));
    if (j.contains("focus")) {
      for (const auto& f : j.at("focus")) {
        const auto labels = f.get<std::vector<std::string>>();
        if (labels.size() != 2) fail(ErrorCode::Config, "each focus entry names exactly two clusters");
        c.focus.push_back({labels[0], labels[1]});
      }
    }
    c.centering = parse_centering(j.value("centering", std::string(centering_name(c.centering))));
    c.significance = j.value("significance", c.significance);
    c.report_threshold = j.value("report_threshold", c.report_threshold);
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("cache_dir")) c.cache_dir = resolve(base_dir, j.at("cache_dir").get<std::string>());
    else c.cache_dir = base_dir / c.cache_dir;
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    else c.output_dir = base_dir / c.output_dir;
    c.seed = j.value("seed", c.seed);
    c.restarts = j.value("restarts", c.restarts);
    if (j.contains("clusters")) {
      c.syntactic_clusters = j.at("clusters").value("syntactic", c.syntactic_clusters);
      c.morphological_clusters = j.at("clusters").value("morphological", c.morphological_clusters);
    }
    c.tail = parse_tail(j.value("tail", std::string(tail_name(c.tail))));
    if (j.contains("delta_window")) {
      const auto& w = j.at("delta_window");
      if (w.contains("layers")) {
        const auto layers = w.at("layers").get<std::vector<int>>();
        if (layers.size() != 2) fail(ErrorCode::Config, "delta_window.layers is [first, last]");
        c.delta_window.first_layer = layers[0];
        c.delta_window.last_layer = layers[1];
      }
      if (w.contains("kinds")) {
        c.delta_window.kinds.clear();
        for (const auto& k : w.at("kinds")) c.delta_window.kinds.push_back(parse_kind(k.get<std::string>()));
      }
    }
    c.layer_count = j.value("layer_count", c.layer_count);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("experiment config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(ErrorCode::Config, e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::absolute(path).parent_path());
}

std::string config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(c.mode);
  for (const auto& r : c.roster) {
    nlohmann::ordered_json e;
    e["language"] = r.language;
    if (!r.checkpoint.empty()) e["checkpoint"] = ref_json(r.checkpoint);
    if (!r.adapted.empty()) e["adapted_checkpoint"] = ref_json(r.adapted);
    j["roster"].push_back(e);
  }
  j["tables"] = {{"syntactic", c.syntactic_table.string()}, {"morphological", c.morphological_table.string()}};
  if (c.layout) j["layout"] = c.layout->string();
  for (auto a : c.spaces) j["spaces"].push_back(area_name(a));
  for (const auto& f : c.focus) j["focus"].push_back({f.first, f.second});
  j["centering"] = centering_name(c.centering);
  j["significance"] = c.significance;
  j["report_threshold"] = c.report_threshold;
  j["parallelism"] = c.parallelism;
  j["cache_dir"] = c.cache_dir.string();
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["clusters"] = {{"syntactic", c.syntactic_clusters}, {"morphological", c.morphological_clusters}};
  j["tail"] = tail_name(c.tail);
  std::vector<std::string> kinds;
  for (auto k : c.delta_window.kinds) kinds.emplace_back(kind_name(k));
  j["delta_window"] = {{"layers", {c.delta_window.first_layer, c.delta_window.last_layer}}, {"kinds", kinds}};
  j["layer_count"] = c.layer_count;
  return j.dump(2);
}

void validate_config(const ExperimentConfig& c) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::Config, msg); };
  std::set<std::string> seen;
  for (const auto& r : c.roster) {
    if (!seen.insert(r.language).second) bad("language '" + r.language + "' listed twice in roster");
  }
  if (c.spaces.empty()) bad("no typological space selected");
  if (!(c.significance > 0.0 && c.significance < 1.0)) bad("significance must lie in (0, 1)");
  if (!(c.report_threshold >= 0.0 && c.report_threshold <= 1.0)) bad("report_threshold must lie in [0, 1]");
  if (c.parallelism == 0) bad("parallelism must be >= 1");
  if (c.restarts == 0) bad("restarts must be >= 1");
  if (c.layer_count != kLayerCount) bad("layer_count must be " + std::to_string(kLayerCount));

  switch (c.mode) {
    case Mode::Full:
      if (c.roster.size() < 3) bad("full mode needs >= 3 languages (3 pairs)");
      for (const auto& r : c.roster) {
        if (r.checkpoint.empty()) bad("roster entry '" + r.language + "' has no checkpoint");
      }
      break;
    case Mode::Focused: {
      if (c.focus.empty()) bad("focused mode needs at least one focus cluster pair");
      for (const auto& r : c.roster) {
        if (r.checkpoint.empty()) bad("roster entry '" + r.language + "' has no checkpoint");
      }
      for (const auto& f : c.focus) {
        const auto [a1, i1] = parse_cluster_label(f.first);
        const auto [a2, i2] = parse_cluster_label(f.second);
        if (a1 != a2) bad("focus pair " + f.first + "/" + f.second + " mixes spaces");
        if (i1 == i2) bad("focus pair " + f.first + "/" + f.second + " names one cluster twice");
        const auto k = c.cluster_count(a1);
        if (i1 < 1 || i1 > k || i2 < 1 || i2 > k) {
          bad("focus pair " + f.first + "/" + f.second + " outside the " + std::to_string(k) + " " +
              std::string(area_name(a1)) + " clusters");
        }
        if (k > c.roster.size()) bad("more clusters than roster languages");
      }
      break;
    }
    case Mode::Adapted: {
      std::size_t adapted = 0;
      for (const auto& r : c.roster) {
        if (r.adapted.empty()) continue;
        if (r.checkpoint.empty()) bad("roster entry '" + r.language + "' has an adapted but no base checkpoint");
        ++adapted;
      }
      if (adapted < 3) bad("adapted mode needs >= 3 languages with adapted checkpoints");
      const auto& w = c.delta_window;
      if (w.first_layer < 0 || w.last_layer >= c.layer_count || w.first_layer > w.last_layer) {
        bad("delta_window layers out of range");
      }
      if (w.kinds.empty()) bad("delta_window has no matrix kinds");
      break;
    }
  }
}

}  // namespace typosim
