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

#include "typoclusters.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "error.hpp"

namespace typosim {
namespace {

using Point = std::vector<double>;

double squared_distance(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// Uniform double in [0, 1) from the raw 64-bit stream, portable across
// standard library implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Run {
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
};

std::vector<Point> compute_means(const std::vector<Point>& points,
                                 const std::vector<std::size_t>& assignment, std::size_t k,
                                 std::vector<std::size_t>& counts) {
  const std::size_t dims = points.front().size();
  std::vector<Point> means(k, Point(dims, 0.0));
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& m = means[assignment[i]];
    for (std::size_t d = 0; d < dims; ++d) m[d] += points[i][d];
    ++counts[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (auto& x : means[c]) x /= static_cast<double>(counts[c]);
  }
  return means;
}

double inertia_of(const std::vector<Point>& points, const std::vector<std::size_t>& assignment,
                  std::size_t k) {
  std::vector<std::size_t> counts;
  const auto means = compute_means(points, assignment, k, counts);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += squared_distance(points[i], means[assignment[i]]);
  return total;
}

// Moves the point farthest from its centre (taken from a cluster with more
// than one member) into each empty cluster.
void repair_empty(const std::vector<Point>& points, std::vector<std::size_t>& assignment,
                  std::vector<Point>& centers, std::vector<std::size_t>& counts) {
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = points.size();
    double best = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assignment[i]] <= 1) continue;
      const double d = squared_distance(points[i], centers[assignment[i]]);
      if (d > best) {
        best = d;
        far = i;
      }
    }
    if (far == points.size()) fail(ErrorCode::Internal, "cannot repair empty cluster");
    --counts[assignment[far]];
    assignment[far] = c;
    counts[c] = 1;
    centers[c] = points[far];
  }
}

Run lloyd(const std::vector<Point>& points, std::vector<Point> centers, std::size_t max_iterations) {
  const std::size_t k = centers.size();
  std::vector<std::size_t> assignment(points.size(), k);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      if (assignment[i] != best_c) {
        assignment[i] = best_c;
        changed = true;
      }
    }
    centers = compute_means(points, assignment, k, counts);
    if (std::count(counts.begin(), counts.end(), std::size_t{0}) > 0) {
      repair_empty(points, assignment, centers, counts);
      centers = compute_means(points, assignment, k, counts);
      changed = true;
    }
    if (!changed) break;
  }
  return {assignment, inertia_of(points, assignment, k)};
}

std::vector<Point> seed_plus_plus(const std::vector<Point>& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centers;
  centers.push_back(points[std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform01(rng) * n))]);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], squared_distance(points[i], centers.back()));
      total += dist[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc > target && dist[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(uniform01(rng) * n);
    }
    centers.push_back(points[pick]);
  }
  return centers;
}

void check_disjoint(std::span<const std::string> c1, std::span<const std::string> c2) {
  if (c1.empty() || c2.empty()) fail(ErrorCode::EmptySet, "clusters must be non-empty");
  std::set<std::string> left;
  for (const auto& l : c1) left.insert(normalize_language_code(l));
  for (const auto& l : c2) {
    if (left.count(normalize_language_code(l))) {
      fail(ErrorCode::ClustersOverlap, "language '" + normalize_language_code(l) + "' is in both clusters");
    }
  }
}

std::vector<int> values_of(std::span<const std::string> cluster, const TypologyTable& table,
                           const std::string& feature) {
  std::vector<int> out;
  out.reserve(cluster.size());
  for (const auto& lang : cluster) out.push_back(table.profile(lang).value(feature).value_index);
  return out;
}

}  // namespace

std::size_t default_cluster_count(Area area) noexcept { return area == Area::Syntactic ? 4 : 3; }

std::string Clustering::label(std::size_t cluster) const {
  return std::string(space == Area::Syntactic ? "S" : "M") + std::to_string(cluster + 1);
}

const std::vector<std::string>& Clustering::cluster(std::string_view name) const {
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (label(c) == name) return members[c];
  }
  fail(ErrorCode::InvalidArgument, "no cluster named '" + std::string(name) + "'");
}

std::size_t Clustering::cluster_of(std::string_view language) const {
  const auto key = normalize_language_code(language);
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (std::find(members[c].begin(), members[c].end(), key) != members[c].end()) return c;
  }
  fail(ErrorCode::InvalidArgument, "language '" + key + "' is not clustered");
}

Clustering kmeans(std::span<const TypologicalVector> vectors, Area space, const KMeansOptions& options) {
  const std::size_t n = vectors.size();
  if (options.k == 0 || options.k > n) {
    fail(ErrorCode::BadClusterCount,
         "k = " + std::to_string(options.k) + " with " + std::to_string(n) + " languages");
  }
  if (options.restarts == 0) fail(ErrorCode::InvalidArgument, "restarts must be >= 1");
  for (const auto& v : vectors) {
    if (v.space_id != vectors.front().space_id) {
      fail(ErrorCode::SpaceMismatch, "vectors come from different spaces");
    }
  }

  // Canonical order (by language code) keeps the result independent of input order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&vectors](std::size_t a, std::size_t b) { return vectors[a].language < vectors[b].language; });
  for (std::size_t i = 1; i < n; ++i) {
    if (vectors[order[i]].language == vectors[order[i - 1]].language) {
      fail(ErrorCode::InvalidArgument, "language '" + vectors[order[i]].language + "' listed twice");
    }
  }
  std::vector<Point> points;
  points.reserve(n);
  for (std::size_t idx : order) {
    points.emplace_back(vectors[idx].bits.begin(), vectors[idx].bits.end());
  }

  std::mt19937_64 rng(options.seed);
  Run best;
  best.inertia = std::numeric_limits<double>::infinity();
  std::size_t best_restart = 0;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    auto run = lloyd(points, seed_plus_plus(points, options.k, rng), options.max_iterations);
    if (run.inertia < best.inertia) {
      best = std::move(run);
      best_restart = r;
    }
  }

  // Number clusters by first appearance in the caller's order.
  std::vector<std::size_t> cluster_of_input(n);
  for (std::size_t i = 0; i < n; ++i) cluster_of_input[order[i]] = best.assignment[i];
  std::map<std::size_t, std::size_t> relabel;
  Clustering out;
  out.space = space;
  out.k = options.k;
  out.inertia = best.inertia;
  out.best_restart = best_restart;
  out.members.resize(options.k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, _] = relabel.emplace(cluster_of_input[i], relabel.size());
    out.members[it->second].push_back(vectors[i].language);
  }
  return out;
}

double clustering_inertia(std::span<const TypologicalVector> vectors,
                          const std::vector<std::vector<std::string>>& members) {
  double total = 0.0;
  for (const auto& cluster : members) {
    std::vector<Point> pts;
    for (const auto& lang : cluster) {
      const auto it = std::find_if(vectors.begin(), vectors.end(),
                                   [&lang](const auto& v) { return v.language == lang; });
      if (it == vectors.end()) fail(ErrorCode::InvalidArgument, "unknown language '" + lang + "'");
      pts.emplace_back(it->bits.begin(), it->bits.end());
    }
    if (pts.empty()) continue;
    Point mean(pts.front().size(), 0.0);
    for (const auto& p : pts) {
      for (std::size_t d = 0; d < p.size(); ++d) mean[d] += p[d];
    }
    for (auto& x : mean) x /= static_cast<double>(pts.size());
    for (const auto& p : pts) total += squared_distance(p, mean);
  }
  return total;
}

double gini(std::span<const int> values) {
  if (values.empty()) fail(ErrorCode::EmptySet, "gini impurity of an empty set");
  std::map<int, std::size_t> counts;
  for (int v : values) ++counts[v];
  const double total = static_cast<double>(values.size());
  double sum_sq = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double FeatureImpurityTriple::margin() const { return gini_union - std::max(gini_c1, gini_c2); }

std::vector<FeatureImpurityTriple> distinctive_features(std::span<const std::string> c1,
                                                        std::span<const std::string> c2,
                                                        const TypologyTable& table) {
  check_disjoint(c1, c2);
  std::vector<FeatureImpurityTriple> out;
  for (const auto& feature : table.space().features) {
    const auto v1 = values_of(c1, table, feature);
    const auto v2 = values_of(c2, table, feature);
    std::vector<int> both = v1;
    both.insert(both.end(), v2.begin(), v2.end());

    FeatureImpurityTriple t;
    t.feature = lookup_feature(feature).value_or(FeatureId{feature, table.area(), ""});
    t.gini_c1 = gini(v1);
    t.gini_c2 = gini(v2);
    t.gini_union = gini(both);
    if (!(t.gini_c1 < t.gini_union && t.gini_c2 < t.gini_union)) continue;

    const std::set<int> s1(v1.begin(), v1.end());
    std::size_t shared = 0;
    for (int v : std::set<int>(v2.begin(), v2.end())) shared += s1.count(v);
    t.polarizing = shared == 0;
    t.nearly_polarizing = shared == 1;
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.margin() != b.margin()) return a.margin() > b.margin();
    return feature_code_less(a.feature.code, b.feature.code);
  });
  return out;
}

std::vector<FeatureId> polarizing_features(std::span<const std::string> c1,
                                           std::span<const std::string> c2,
                                           const TypologyTable& table) {
  std::vector<FeatureId> out;
  for (auto& t : distinctive_features(c1, c2, table)) {
    if (t.polarizing) out.push_back(std::move(t.feature));
  }
  return out;
}

std::vector<LanguagePair> extra_cluster_pairs(std::span<const std::string> c1,
                                              std::span<const std::string> c2) {
  check_disjoint(c1, c2);
  std::vector<LanguagePair> out;
  out.reserve(c1.size() * c2.size());
  for (const auto& a : c1) {
    for (const auto& b : c2) out.push_back(LanguagePair::make(a, b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() != c1.size() * c2.size()) {
    fail(ErrorCode::InvalidArgument, "duplicate languages inside a cluster");
  }
  return out;
}

}  // namespace typosim
