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
#include <span>
#include <string>
#include <vector>

#include "typology.hpp"

namespace typosim {

struct KMeansOptions {
  std::size_t k = 4;
  std::size_t restarts = 500;
  std::uint64_t seed = 42;
  std::size_t max_iterations = 300;
};

// Default cluster counts: 4 syntactic, 3 morphological.
std::size_t default_cluster_count(Area area) noexcept;

struct Clustering {
  Area space = Area::Syntactic;
  std::size_t k = 0;
  // Cluster i holds the languages labelled "<prefix><i+1>" (S1, S2, ... / M1, ...).
  // Clusters are numbered by first appearance of a member in the input order,
  // members keep input order.
  std::vector<std::vector<std::string>> members;
  double inertia = 0.0;
  std::size_t best_restart = 0;

  std::string label(std::size_t cluster) const;
  const std::vector<std::string>& cluster(std::string_view label) const;
  std::size_t cluster_of(std::string_view language) const;
};

/// Best-inertia Lloyd clustering over `restarts` runs, each seeded with
/// k-means++ (D^2 sampling) from a generator derived from `seed`. Euclidean
/// distance on the boolean vectors. The result does not depend on the order of
/// `vectors` except for cluster numbering.
Clustering kmeans(std::span<const TypologicalVector> vectors, Area space, const KMeansOptions& options);

// Sum of squared distances of members to their cluster means.
double clustering_inertia(std::span<const TypologicalVector> vectors,
                          const std::vector<std::vector<std::string>>& members);

/// 1 - sum_v (count_v / total)^2 over the value indices.
double gini(std::span<const int> values);

struct FeatureImpurityTriple {
  FeatureId feature;
  double gini_c1 = 0.0;
  double gini_c2 = 0.0;
  double gini_union = 0.0;
  bool polarizing = false;         // value sets of the two clusters are disjoint
  bool nearly_polarizing = false;  // not polarizing; exactly one value shared

  double margin() const;  // gini_union - max(gini_c1, gini_c2)
};

/// Features whose impurity inside each cluster is strictly below the
/// impurity of the union, ranked by margin() descending (ties by feature code).
std::vector<FeatureImpurityTriple> distinctive_features(std::span<const std::string> c1,
                                                        std::span<const std::string> c2,
                                                        const TypologyTable& table);

std::vector<FeatureId> polarizing_features(std::span<const std::string> c1,
                                           std::span<const std::string> c2,
                                           const TypologyTable& table);

// Every cross pair c1 x c2, sorted.
std::vector<LanguagePair> extra_cluster_pairs(std::span<const std::string> c1,
                                              std::span<const std::string> c2);

}  // namespace typosim
