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

#include "typosim/typosim.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "runner/experiment.hpp"
#include "runner/reports.hpp"
#include "simkernel.hpp"
#include "stats.hpp"
#include "typoclusters.hpp"
#include "typology.hpp"
#include "weights/layout.hpp"

struct ts_typology {
  typosim::TypologyTable table;
};

struct ts_container {
  typosim::TensorContainer container;
};

struct ts_experiment {
  typosim::ExperimentConfig config;
  bool focus_overridden = false;
};

struct ts_bundle {
  typosim::ReportBundle bundle;
};

namespace {

using namespace typosim;
using ojson = nlohmann::ordered_json;

thread_local std::string last_error;

ts_status set_error(ts_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <typename Fn>
ts_status guard(Fn&& fn) noexcept {
  try {
    last_error.clear();
    fn();
    return TS_OK;
  } catch (const Error& e) {
    return set_error(static_cast<ts_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TS_INTERNAL, e.what());
  } catch (...) {
    return set_error(TS_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Centering to_centering(ts_centering c) {
  if (c == TS_CENTERED) return Centering::Centered;
  if (c == TS_UNCENTERED) return Centering::Uncentered;
  fail(ErrorCode::InvalidArgument, "unknown centering value");
}

std::vector<std::string> split_codes(const char* text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(normalize_language_code(item));
  }
  return out;
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix from_row_major(const double* data, std::size_t rows, std::size_t cols) {
  return Eigen::Map<const RowMajor>(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

RunOptions run_options(ts_log_fn log, void* user) {
  RunOptions o;
  if (log != nullptr) o.log = [log, user](const std::string& line) { log(line.c_str(), user); };
  return o;
}

double parse_number(const std::string& key, const char* value) {
  char* end = nullptr;
  const double v = std::strtod(value, &end);
  if (end == value || *end != '\0') fail(ErrorCode::Config, key + " expects a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const char* value) {
  char* end = nullptr;
  const auto v = std::strtoull(value, &end, 10);
  if (end == value || *end != '\0' || value[0] == '-') {
    fail(ErrorCode::Config, key + " expects a non-negative integer, got '" + value + "'");
  }
  return v;
}

}  // namespace

extern "C" {

const char* ts_version(void) { return "1.0.0"; }

const char* ts_status_name(ts_status status) {
  if (status == TS_OK) return "Ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* ts_last_error(void) { return last_error.c_str(); }

void ts_string_free(char* s) { std::free(s); }

ts_status ts_typology_load(const char* path, const char* area, ts_typology** out) {
  return guard([&] {
    require(area, "area");
    require(out, "out");
    const Area a = parse_area(area);
    const std::filesystem::path p =
        path != nullptr ? std::filesystem::path(path)
                        : bundled_data_dir() / (a == Area::Syntactic ? "wals_syntactic.tsv" : "wals_morphological.tsv");
    *out = new ts_typology{TypologyTable::from_file(p, a)};
  });
}

void ts_typology_free(ts_typology* t) { delete t; }

ts_status ts_typology_languages_json(const ts_typology* t, char** out) {
  return guard([&] {
    require(t, "typology");
    require(out, "out");
    *out = dup_string(ojson(t->table.languages()).dump());
  });
}

ts_status ts_typology_similarity(const ts_typology* t, const char* a, const char* b, double* out) {
  return guard([&] {
    require(t, "typology");
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = t->table.sigma(normalize_language_code(a), normalize_language_code(b));
  });
}

ts_status ts_typology_ranking_json(const ts_typology* t, char** out) {
  return guard([&] {
    require(t, "typology");
    require(out, "out");
    ojson j = ojson::array();
    for (const auto& r : pair_ranking(t->table.vectors())) j.push_back({{"pair", r.pair.label()}, {"sigma", r.sigma}});
    *out = dup_string(j.dump());
  });
}

ts_status ts_typology_clusters_json(const ts_typology* t, size_t k, size_t restarts, uint64_t seed, char** out) {
  return guard([&] {
    require(t, "typology");
    require(out, "out");
    KMeansOptions opts;
    opts.k = k == 0 ? default_cluster_count(t->table.area()) : k;
    if (restarts != 0) opts.restarts = restarts;
    opts.seed = seed;
    const auto c = kmeans(t->table.vectors(), t->table.area(), opts);
    ojson j;
    j["space"] = area_name(c.space);
    j["k"] = c.k;
    j["inertia"] = c.inertia;
    j["best_restart"] = c.best_restart;
    for (std::size_t i = 0; i < c.members.size(); ++i) j["clusters"][c.label(i)] = c.members[i];
    *out = dup_string(j.dump());
  });
}

ts_status ts_typology_features_json(const ts_typology* t, const char* c1, const char* c2, char** out) {
  return guard([&] {
    require(t, "typology");
    require(c1, "c1");
    require(c2, "c2");
    require(out, "out");
    const auto a = split_codes(c1);
    const auto b = split_codes(c2);
    ojson j;
    j["distinctive"] = ojson::array();
    for (const auto& f : distinctive_features(a, b, t->table)) {
      j["distinctive"].push_back({{"feature", f.feature.code},
                                  {"gini_c1", f.gini_c1},
                                  {"gini_c2", f.gini_c2},
                                  {"gini_union", f.gini_union},
                                  {"polarizing", f.polarizing},
                                  {"nearly_polarizing", f.nearly_polarizing}});
    }
    j["polarizing"] = ojson::array();
    for (const auto& f : polarizing_features(a, b, t->table)) j["polarizing"].push_back(f.code);
    j["pairs"] = ojson::array();
    for (const auto& p : extra_cluster_pairs(a, b)) j["pairs"].push_back(p.label());
    *out = dup_string(j.dump());
  });
}

ts_status ts_cka(const double* x, size_t x_cols, const double* y, size_t y_cols, size_t rows,
                 ts_centering centering, double* out) {
  return guard([&] {
    require(x, "x");
    require(y, "y");
    require(out, "out");
    *out = linear_cka(from_row_major(x, rows, x_cols), from_row_major(y, rows, y_cols), to_centering(centering));
  });
}

ts_status ts_bicka(const double* w1, const double* w2, size_t rows, size_t cols, ts_centering centering,
                   ts_route route, double* out) {
  return guard([&] {
    require(w1, "w1");
    require(w2, "w2");
    require(out, "out");
    const auto a = from_row_major(w1, rows, cols);
    const auto b = from_row_major(w2, rows, cols);
    const auto mode = to_centering(centering);
    if (route == TS_ROUTE_FAST) {
      *out = bicka_fast(a, b, mode);
    } else if (route == TS_ROUTE_DIRECT) {
      *out = bicka_direct(a, b, mode);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown route");
    }
  });
}

ts_status ts_spearman(const double* a, const double* b, size_t n, double* out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = spearman(std::span<const double>(a, n), std::span<const double>(b, n));
  });
}

ts_status ts_p_value(double rho, size_t n, ts_tail tail, double* out) {
  return guard([&] {
    require(out, "out");
    if (tail != TS_TWO_SIDED && tail != TS_GREATER) fail(ErrorCode::InvalidArgument, "unknown tail");
    *out = p_value(rho, n, tail == TS_TWO_SIDED ? Tail::TwoSided : Tail::Greater);
  });
}

ts_status ts_container_open(const char* path, ts_container** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new ts_container{TensorContainer::open(path)};
  });
}

void ts_container_free(ts_container* c) { delete c; }

ts_status ts_container_tensors_json(const ts_container* c, char** out) {
  return guard([&] {
    require(c, "container");
    require(out, "out");
    ojson j;
    j["format"] = c->container.format() == ContainerFormat::Raw ? "raw" : "safetensors";
    j["tensors"] = ojson::array();
    for (const auto& [name, info] : c->container.tensors()) {
      j["tensors"].push_back({{"name", name}, {"dtype", dtype_name(info.dtype)}, {"shape", info.shape}});
    }
    j["metadata"] = c->container.metadata();
    *out = dup_string(j.dump());
  });
}

ts_status ts_container_validate_json(const ts_container* c, const char* layout_path, int expected_layers,
                                     char** out) {
  return guard([&] {
    require(c, "container");
    require(out, "out");
    const auto cfg = layout_path != nullptr ? load_layout_config(layout_path) : default_layout();
    const auto map = resolve_layout(cfg, c->container);
    const auto report = validate_model(c->container, map, expected_layers > 0 ? expected_layers : kLayerCount);
    auto j = nlohmann::json::parse(report.to_json());
    j["prefix"] = map.prefix;
    *out = dup_string(j.dump());
  });
}

ts_status ts_experiment_load(const char* config_path, ts_experiment** out) {
  return guard([&] {
    require(config_path, "config_path");
    require(out, "out");
    *out = new ts_experiment{load_config(config_path)};
  });
}

ts_status ts_experiment_from_json(const char* json, const char* base_dir, ts_experiment** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    const std::filesystem::path base = base_dir != nullptr ? base_dir : std::filesystem::current_path();
    *out = new ts_experiment{parse_config(json, base)};
  });
}

void ts_experiment_free(ts_experiment* e) { delete e; }

ts_status ts_experiment_set(ts_experiment* e, const char* key_c, const char* value) {
  return guard([&] {
    require(e, "experiment");
    require(key_c, "key");
    require(value, "value");
    const std::string key = key_c;
    auto& c = e->config;
    if (key == "mode") {
      c.mode = parse_mode(value);
    } else if (key == "centering") {
      c.centering = parse_centering(value);
    } else if (key == "significance") {
      c.significance = parse_number(key, value);
    } else if (key == "report_threshold") {
      c.report_threshold = parse_number(key, value);
    } else if (key == "parallelism") {
      c.parallelism = parse_unsigned(key, value);
    } else if (key == "seed") {
      c.seed = parse_unsigned(key, value);
    } else if (key == "restarts") {
      c.restarts = parse_unsigned(key, value);
    } else if (key == "cache_dir") {
      c.cache_dir = value;
    } else if (key == "output_dir") {
      c.output_dir = value;
    } else if (key == "tail") {
      c.tail = parse_tail(value);
    } else if (key == "focus") {
      std::vector<std::string> labels;
      std::stringstream in(value);
      std::string item;
      while (std::getline(in, item, ',')) labels.push_back(item);
      if (labels.size() != 2) fail(ErrorCode::Config, "focus expects two cluster labels, e.g. S1,S2");
      if (!e->focus_overridden) c.focus.clear();
      e->focus_overridden = true;
      c.focus.push_back({labels[0], labels[1]});
    } else {
      fail(ErrorCode::Config, "unknown setting '" + key + "'");
    }
  });
}

ts_status ts_experiment_config_json(const ts_experiment* e, char** out) {
  return guard([&] {
    require(e, "experiment");
    require(out, "out");
    *out = dup_string(config_json(e->config));
  });
}

ts_status ts_experiment_fetch(const ts_experiment* e, ts_log_fn log, void* user, char** out) {
  return guard([&] {
    require(e, "experiment");
    require(out, "out");
    validate_config(e->config);
    const auto opts = run_options(log, user);
    const auto set = fetch_models(e->config, opts.fetch);
    ojson j;
    j["downloads"] = set.downloads;
    for (const auto* group : {&set.base, &set.adapted}) {
      const char* name = group == &set.base ? "base" : "adapted";
      j[name] = ojson::object();
      for (const auto& [lang, ck] : *group) j[name][lang] = {{"path", ck.path.string()}, {"sha256", ck.digest}};
    }
    *out = dup_string(j.dump(2));
  });
}

ts_status ts_experiment_run(const ts_experiment* e, ts_log_fn log, void* user, ts_bundle** out) {
  return guard([&] {
    require(e, "experiment");
    require(out, "out");
    *out = new ts_bundle{run_experiment(e->config, run_options(log, user))};
  });
}

void ts_bundle_free(ts_bundle* b) { delete b; }

ts_status ts_bundle_emit(ts_bundle* b, const char* dir, char** manifest_json) {
  return guard([&] {
    require(b, "bundle");
    require(dir, "dir");
    const auto manifest = emit_reports(b->bundle, dir);
    if (manifest_json != nullptr) *manifest_json = dup_string(ojson(manifest).dump());
  });
}

ts_status ts_bundle_summary_json(const ts_bundle* b, char** out) {
  return guard([&] {
    require(b, "bundle");
    require(out, "out");
    *out = dup_string(bundle_summary_json(b->bundle));
  });
}

ts_status ts_bundle_grid_csv(const ts_bundle* b, const char* grid_id, char** out) {
  return guard([&] {
    require(b, "bundle");
    require(grid_id, "grid_id");
    require(out, "out");
    *out = dup_string(grid_to_csv(b->bundle.grid(grid_id).grid));
  });
}

ts_status ts_bundle_stats_json(const ts_bundle* b, char** out) {
  return guard([&] {
    require(b, "bundle");
    require(out, "out");
    const auto& s = b->bundle.compute;
    ojson j{{"scores_computed", s.scores_computed},
            {"scores_cached", s.scores_cached},
            {"matrices_read", s.matrices_read}};
    *out = dup_string(j.dump());
  });
}

ts_status ts_report_render(const char* dir_c, double significance, char** manifest_json) {
  return guard([&] {
    require(dir_c, "dir");
    const std::filesystem::path dir(dir_c);
    if (!std::filesystem::is_directory(dir)) fail(ErrorCode::Io, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> csvs;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (entry.path().extension() == ".csv" && name.rfind("pairs_", 0) != 0) csvs.push_back(entry.path());
    }
    std::sort(csvs.begin(), csvs.end());
    std::vector<std::string> written;
    for (const auto& p : csvs) {
      std::ifstream in(p);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto grid = parse_grid_csv(buf.str());
      const auto svg_path = std::filesystem::path(p).replace_extension(".svg");
      std::ofstream out(svg_path, std::ios::trunc);
      if (!out) fail(ErrorCode::Io, "cannot write " + svg_path.string());
      out << grid_to_svg(grid, std::string(area_name(grid.space)) + " / " + grid.pair_set, significance);
      written.push_back(svg_path.filename().string());
    }
    if (manifest_json != nullptr) *manifest_json = dup_string(ojson(written).dump());
  });
}

}  // extern "C"
