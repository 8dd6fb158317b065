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

#include "runner/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"

namespace typosim {
namespace {

void say(const RunOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

LayoutConfig layout_for(const ExperimentConfig& config) {
  return config.layout ? load_layout_config(*config.layout) : default_layout();
}

std::map<std::string, LocalCheckpoint> subset(const std::map<std::string, LocalCheckpoint>& all,
                                              const std::vector<LanguagePair>& pairs) {
  std::set<std::string> used;
  for (const auto& p : pairs) {
    used.insert(p.first);
    used.insert(p.second);
  }
  std::map<std::string, LocalCheckpoint> out;
  for (const auto& lang : used) {
    const auto it = all.find(lang);
    if (it == all.end()) fail(ErrorCode::Config, "no checkpoint for language '" + lang + "'");
    out.emplace(lang, it->second);
  }
  return out;
}

PairSimilarityTable score_pairs(const ExperimentConfig& config, const std::map<std::string, LocalCheckpoint>& ckpts,
                                const std::vector<LanguagePair>& pairs, const TypologyData& typology,
                                const RunOptions& options, PairComputeStats* stats) {
  const auto models = open_models(subset(ckpts, pairs), layout_for(config), config.layer_count);
  std::vector<const Model*> refs;
  for (const auto& m : models) refs.push_back(&m);
  say(options, "scoring " + std::to_string(pairs.size()) + " pairs over " + std::to_string(models.size()) +
                   " models (hidden size " + std::to_string(models.front().architecture.hidden_size) + ")");
  ScoreCache cache(config.cache_dir / "scores.v1.tsv");
  auto table = compute_pair_table(refs, pairs, config.centering, config.parallelism, cache, stats);
  fill_sigma(table, typology);
  return table;
}

void accumulate(PairComputeStats& total, const PairComputeStats& part) {
  total.scores_computed += part.scores_computed;
  total.scores_cached += part.scores_cached;
  total.matrices_read += part.matrices_read;
}

CorrelationGrid grid_for(const PairSimilarityTable& table, Area space, const std::string& pair_set, Tail tail) {
  return correlation_grid(table, sigma_map(table, space), space, pair_set, tail);
}

}  // namespace

const GridReport& ReportBundle::grid(std::string_view id) const {
  for (const auto& g : grids) {
    if (g.id == id) return g;
  }
  fail(ErrorCode::InvalidArgument, "bundle has no grid '" + std::string(id) + "'");
}

TypologyData load_typology(const ExperimentConfig& config) {
  TypologyData data{TypologyTable::from_file(config.syntactic_table, Area::Syntactic),
                    TypologyTable::from_file(config.morphological_table, Area::Morphological)};
  for (const auto& r : config.roster) {
    for (const auto* t : {&data.syntactic, &data.morphological}) {
      if (!t->contains(r.language)) {
        fail(ErrorCode::Config, "roster language '" + r.language + "' missing from the " +
                                    std::string(area_name(t->area())) + " table");
      }
    }
  }
  return data;
}

std::vector<LanguagePair> all_pairs(std::span<const std::string> languages) {
  std::vector<LanguagePair> out;
  for (std::size_t i = 0; i < languages.size(); ++i) {
    for (std::size_t j = i + 1; j < languages.size(); ++j) out.push_back(LanguagePair::make(languages[i], languages[j]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Clustering cluster_roster(const ExperimentConfig& config, const TypologyData& typology, Area space) {
  const auto& table = typology.table(space);
  std::vector<TypologicalVector> vectors;
  for (const auto& r : config.roster) vectors.push_back(table.vector(r.language));
  KMeansOptions opts;
  opts.k = config.cluster_count(space);
  opts.restarts = config.restarts;
  opts.seed = config.seed;
  return kmeans(vectors, space, opts);
}

void fill_sigma(PairSimilarityTable& table, const TypologyData& typology) {
  for (auto& row : table.rows) {
    row.sigma_synt = typology.syntactic.sigma(row.pair.first, row.pair.second);
    row.sigma_morph = typology.morphological.sigma(row.pair.first, row.pair.second);
  }
}

SigmaMap sigma_map(const PairSimilarityTable& table, Area space) {
  SigmaMap out;
  for (const auto& row : table.rows) out.emplace(row.pair, row.sigma(space));
  return out;
}

PairSimilarityTable restrict_table(const PairSimilarityTable& table, std::span<const LanguagePair> pairs) {
  PairSimilarityTable out;
  out.centering = table.centering;
  std::set<std::string> langs;
  for (const auto& p : pairs) {
    out.rows.push_back(table.at(p));
    langs.insert(p.first);
    langs.insert(p.second);
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) { return a.pair < b.pair; });
  for (const auto& [lang, digest] : table.digests) {
    if (langs.count(lang)) out.digests.emplace(lang, digest);
  }
  return out;
}

PairSimilarityTable compute_pair_table(const ExperimentConfig& config, const std::vector<LanguagePair>& pairs,
                                       bool adapted, const RunOptions& options, PairComputeStats* stats) {
  validate_config(config);
  const auto typology = load_typology(config);
  const auto ckpts = fetch_models(config, options.fetch);
  return score_pairs(config, adapted ? ckpts.adapted : ckpts.base, pairs, typology, options, stats);
}

ReportBundle run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_config(config);
  const auto typology = load_typology(config);

  ReportBundle bundle;
  bundle.mode = config.mode;
  bundle.centering = config.centering;
  bundle.tail = config.tail;
  bundle.significance = config.significance;
  bundle.report_threshold = config.report_threshold;

  // Everything cheap and checkable happens before checkpoints are touched.
  std::vector<LanguagePair> pairs;
  if (config.mode == Mode::Full) {
    pairs = all_pairs(config.languages());
  } else if (config.mode == Mode::Focused) {
    std::set<Area> clustered;
    for (const auto& f : config.focus) clustered.insert(f.first[0] == 'S' ? Area::Syntactic : Area::Morphological);
    for (auto area : clustered) {
      bundle.clusterings.push_back(cluster_roster(config, typology, area));
      say(options, std::string(area_name(area)) + " clustering inertia " +
                       std::to_string(bundle.clusterings.back().inertia));
    }
    std::set<LanguagePair> union_pairs;
    for (const auto& f : config.focus) {
      const Area area = f.first[0] == 'S' ? Area::Syntactic : Area::Morphological;
      const auto& clustering =
          *std::find_if(bundle.clusterings.begin(), bundle.clusterings.end(),
                        [area](const Clustering& c) { return c.space == area; });
      FocusReport fr;
      fr.clusters = f;
      fr.space = area;
      fr.first_members = clustering.cluster(f.first);
      fr.second_members = clustering.cluster(f.second);
      fr.pairs = extra_cluster_pairs(fr.first_members, fr.second_members);
      if (fr.pairs.size() < 3) {
        fail(ErrorCode::InsufficientData, "focus " + f.first + "x" + f.second + " yields " +
                                              std::to_string(fr.pairs.size()) + " pairs; >= 3 needed");
      }
      const auto& table = typology.table(area);
      fr.distinctive = distinctive_features(fr.first_members, fr.second_members, table);
      fr.polarizing = polarizing_features(fr.first_members, fr.second_members, table);
      union_pairs.insert(fr.pairs.begin(), fr.pairs.end());
      bundle.focus.push_back(std::move(fr));
    }
    pairs.assign(union_pairs.begin(), union_pairs.end());
  } else {
    std::vector<std::string> langs;
    for (const auto& r : config.roster) {
      if (!r.adapted.empty()) langs.push_back(r.language);
    }
    pairs = all_pairs(langs);
  }
  if (pairs.size() < 3) fail(ErrorCode::InsufficientData, "fewer than 3 language pairs");
  layout_for(config);  // surfaces layout config errors before any download

  say(options, "resolving checkpoints");
  const auto ckpts = fetch_models(config, options.fetch);
  if (ckpts.downloads > 0) say(options, "downloaded " + std::to_string(ckpts.downloads) + " checkpoint(s)");

  PairComputeStats part;
  switch (config.mode) {
    case Mode::Full: {
      auto table = score_pairs(config, ckpts.base, pairs, typology, options, &part);
      accumulate(bundle.compute, part);
      for (auto area : config.spaces) {
        bundle.grids.push_back({"full_" + std::string(area_name(area)), grid_for(table, area, "full", config.tail)});
      }
      bundle.tables.push_back({"full", std::move(table)});
      break;
    }
    case Mode::Focused: {
      auto table = score_pairs(config, ckpts.base, pairs, typology, options, &part);
      accumulate(bundle.compute, part);
      for (const auto& fr : bundle.focus) {
        const auto set = fr.clusters.first + "x" + fr.clusters.second;
        const auto sub = restrict_table(table, fr.pairs);
        bundle.grids.push_back(
            {"focused_" + set + "_" + std::string(area_name(fr.space)), grid_for(sub, fr.space, set, config.tail)});
      }
      bundle.tables.push_back({"focused", std::move(table)});
      break;
    }
    case Mode::Adapted: {
      auto pre = score_pairs(config, ckpts.base, pairs, typology, options, &part);
      accumulate(bundle.compute, part);
      auto post = score_pairs(config, ckpts.adapted, pairs, typology, options, &part);
      accumulate(bundle.compute, part);
      for (auto area : config.spaces) {
        const auto name = std::string(area_name(area));
        auto g_pre = grid_for(pre, area, "adapted-pre", config.tail);
        auto g_post = grid_for(post, area, "adapted-post", config.tail);
        CorrelationGrid delta;
        delta.space = area;
        delta.pair_set = "adapted-delta";
        delta.n = g_pre.n;
        for (std::size_t c = 0; c < kCellCount; ++c) {
          delta.cells[c] = g_post.cells[c];
          delta.cells[c].rho = g_post.cells[c].rho - g_pre.cells[c].rho;
          delta.cells[c].p = std::nan("");
        }
        DeltaSummary summary;
        summary.space = area;
        summary.window = config.delta_window;
        double sum = 0.0;
        for (auto kind : config.delta_window.kinds) {
          for (int layer = config.delta_window.first_layer; layer <= config.delta_window.last_layer; ++layer) {
            sum += delta.cell(kind, layer).rho;
            ++summary.cells;
          }
        }
        summary.mean_delta = sum / static_cast<double>(summary.cells);
        bundle.deltas.push_back(summary);
        bundle.grids.push_back({"adapted_pre_" + name, std::move(g_pre)});
        bundle.grids.push_back({"adapted_post_" + name, std::move(g_post)});
        bundle.grids.push_back({"adapted_delta_" + name, std::move(delta), true});
      }
      bundle.tables.push_back({"adapted_pre", std::move(pre)});
      bundle.tables.push_back({"adapted_post", std::move(post)});
      break;
    }
  }
  say(options, "scores computed " + std::to_string(bundle.compute.scores_computed) + ", cached " +
                   std::to_string(bundle.compute.scores_cached));
  return bundle;
}

}  // namespace typosim
