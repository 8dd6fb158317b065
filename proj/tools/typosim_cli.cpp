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

// typosim command-line interface. Everything goes through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "typosim/typosim.h"

namespace {

struct Failure {
  ts_status status;
};

void check(ts_status status) {
  if (status != TS_OK) {
    std::cerr << "typosim: " << ts_last_error() << "\n";
    throw Failure{status};
  }
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  ts_string_free(s);
  return out;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void log_line(const char* line, void*) { std::cerr << "[typosim] " << line << "\n"; }

struct RunFlags {
  std::string config;
  std::optional<std::string> centering;
  std::optional<double> significance;
  std::optional<double> report_threshold;
  std::optional<unsigned> parallelism;
  std::optional<unsigned long long> seed;
  std::optional<unsigned long long> restarts;
  std::optional<std::string> cache_dir;
  std::optional<std::string> output_dir;
  std::optional<std::string> tail;
  std::vector<std::string> focus;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_focus) {
  cmd->add_option("-c,--config", f.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--centering", f.centering, "centered | uncentered")
      ->check(CLI::IsMember({"centered", "uncentered"}));
  cmd->add_option("--significance", f.significance, "p-value threshold for starred cells");
  cmd->add_option("--report-threshold", f.report_threshold, "rho threshold for notable cells");
  cmd->add_option("-j,--parallelism", f.parallelism, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "k-means seed");
  cmd->add_option("--restarts", f.restarts, "k-means restarts");
  cmd->add_option("--cache-dir", f.cache_dir, "checkpoint and score cache directory");
  cmd->add_option("-o,--output-dir", f.output_dir, "report directory");
  cmd->add_option("--tail", f.tail, "two-sided | greater")->check(CLI::IsMember({"two-sided", "greater"}));
  if (with_focus) cmd->add_option("--focus", f.focus, "cluster pair such as S1,S2 (repeatable)");
  cmd->add_flag("-q,--quiet", f.quiet, "no progress output");
}

ts_experiment* load_experiment(const RunFlags& f, const char* mode) {
  ts_experiment* e = nullptr;
  check(ts_experiment_load(f.config.c_str(), &e));
  auto set = [e](const char* key, const std::string& value) {
    const auto status = ts_experiment_set(e, key, value.c_str());
    if (status != TS_OK) {
      std::cerr << "typosim: " << ts_last_error() << "\n";
      ts_experiment_free(e);
      throw Failure{status};
    }
  };
  if (mode != nullptr) set("mode", mode);
  if (f.centering) set("centering", *f.centering);
  if (f.significance) set("significance", exact(*f.significance));
  if (f.report_threshold) set("report_threshold", exact(*f.report_threshold));
  if (f.parallelism) set("parallelism", std::to_string(*f.parallelism));
  if (f.seed) set("seed", std::to_string(*f.seed));
  if (f.restarts) set("restarts", std::to_string(*f.restarts));
  if (f.cache_dir) set("cache_dir", *f.cache_dir);
  if (f.output_dir) set("output_dir", *f.output_dir);
  if (f.tail) set("tail", *f.tail);
  for (const auto& focus : f.focus) set("focus", focus);
  return e;
}

int run_mode(const RunFlags& f, const char* mode) {
  ts_experiment* e = load_experiment(f, mode);
  char* config_text = nullptr;
  if (ts_experiment_config_json(e, &config_text) != TS_OK) {
    ts_experiment_free(e);
    check(TS_INTERNAL);
  }
  const auto config = nlohmann::json::parse(take(config_text));
  ts_bundle* b = nullptr;
  const auto status = ts_experiment_run(e, f.quiet ? nullptr : log_line, nullptr, &b);
  ts_experiment_free(e);
  check(status);
  const std::string out_dir = config.at("output_dir").get<std::string>();
  char* manifest = nullptr;
  const auto emit_status = ts_bundle_emit(b, out_dir.c_str(), &manifest);
  char* stats = nullptr;
  if (emit_status == TS_OK) ts_bundle_stats_json(b, &stats);
  ts_bundle_free(b);
  check(emit_status);
  const auto files = nlohmann::json::parse(take(manifest));
  std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
  for (const auto& name : files) std::cout << "  " << name.get<std::string>() << "\n";
  if (stats != nullptr) std::cout << take(stats) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typological similarity vs. layer-wise weight similarity of monolingual encoders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ts_version()));

  RunFlags fetch_flags, full_flags, focused_flags, adapted_flags;
  auto* fetch = app.add_subcommand("fetch", "Download and verify every checkpoint in the roster");
  add_run_flags(fetch, fetch_flags, false);
  auto* full = app.add_subcommand("full", "All language pairs, grids for each typological space");
  add_run_flags(full, full_flags, false);
  auto* focused = app.add_subcommand("focused", "Extra-cluster pairs of two typological clusters");
  add_run_flags(focused, focused_flags, true);
  auto* adapted = app.add_subcommand("adapted", "Pre/post domain-adaptation grids and their difference");
  add_run_flags(adapted, adapted_flags, false);

  std::string report_dir;
  double report_significance = 0.01;
  auto* report = app.add_subcommand("report", "Re-render SVG heatmaps from grid CSVs");
  report->add_option("dir", report_dir, "report directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--significance", report_significance, "p-value threshold for starred cells");

  std::string area = "syntactic";
  std::string table;
  std::string action = "ranking";
  std::vector<std::string> args;
  std::size_t k = 0;
  std::size_t restarts = 0;
  unsigned long long seed = 42;
  auto* typology = app.add_subcommand("typology", "Typological similarity, rankings, clusters and features");
  typology->add_option("action", action, "ranking | sigma A B | clusters | features C1 C2")
      ->check(CLI::IsMember({"ranking", "sigma", "clusters", "features", "languages"}));
  typology->add_option("args", args, "arguments of the action");
  typology->add_option("--area", area, "syntactic | morphological")
      ->check(CLI::IsMember({"syntactic", "morphological"}));
  typology->add_option("--table", table, "WALS table (defaults to the bundled one)");
  typology->add_option("-k", k, "cluster count (0 = default for the area)");
  typology->add_option("--restarts", restarts, "k-means restarts (0 = default)");
  typology->add_option("--seed", seed, "k-means seed");

  std::string checkpoint;
  std::string layout;
  int layers = 12;
  auto* inspect = app.add_subcommand("inspect", "List tensors and validate a checkpoint against a layout");
  inspect->add_option("checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--layout", layout, "layout config (JSON)");
  inspect->add_option("--layers", layers, "required layer count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fetch) {
      ts_experiment* e = load_experiment(fetch_flags, nullptr);
      char* out = nullptr;
      const auto status = ts_experiment_fetch(e, fetch_flags.quiet ? nullptr : log_line, nullptr, &out);
      ts_experiment_free(e);
      check(status);
      std::cout << take(out) << "\n";
    } else if (*full) {
      return run_mode(full_flags, "full");
    } else if (*focused) {
      return run_mode(focused_flags, "focused");
    } else if (*adapted) {
      return run_mode(adapted_flags, "adapted");
    } else if (*report) {
      char* out = nullptr;
      check(ts_report_render(report_dir.c_str(), report_significance, &out));
      std::cout << take(out) << "\n";
    } else if (*typology) {
      ts_typology* t = nullptr;
      check(ts_typology_load(table.empty() ? nullptr : table.c_str(), area.c_str(), &t));
      char* out = nullptr;
      ts_status status = TS_OK;
      double sigma = 0.0;
      if (action == "ranking") {
        status = ts_typology_ranking_json(t, &out);
      } else if (action == "languages") {
        status = ts_typology_languages_json(t, &out);
      } else if (action == "clusters") {
        status = ts_typology_clusters_json(t, k, restarts, seed, &out);
      } else if (args.size() != 2) {
        ts_typology_free(t);
        std::cerr << "typosim: " << action << " takes two arguments\n";
        return TS_INVALID_ARGUMENT;
      } else if (action == "sigma") {
        status = ts_typology_similarity(t, args[0].c_str(), args[1].c_str(), &sigma);
      } else {
        status = ts_typology_features_json(t, args[0].c_str(), args[1].c_str(), &out);
      }
      ts_typology_free(t);
      check(status);
      if (action == "sigma") {
        std::printf("%.17g\n", sigma);
      } else {
        std::cout << nlohmann::json::parse(take(out)).dump(2) << "\n";
      }
    } else if (*inspect) {
      ts_container* c = nullptr;
      check(ts_container_open(checkpoint.c_str(), &c));
      char* tensors = nullptr;
      char* report_json = nullptr;
      auto status = ts_container_tensors_json(c, &tensors);
      if (status == TS_OK) status = ts_container_validate_json(c, layout.empty() ? nullptr : layout.c_str(), layers,
                                                               &report_json);
      ts_container_free(c);
      const std::string listing = take(tensors);
      check(status);
      const auto info = nlohmann::json::parse(listing);
      nlohmann::ordered_json j;
      j["format"] = info.at("format");
      j["tensor_count"] = info.at("tensors").size();
      j["architecture"] = nlohmann::json::parse(take(report_json));
      std::cout << j.dump(2) << "\n";
    }
  } catch (const Failure& f) {
    return static_cast<int>(f.status);
  }
  return 0;
}
