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

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "error.hpp"
#include "runner/config.hpp"
#include "typoclusters.hpp"

using namespace typosim;

namespace {

using Partition = std::set<std::set<std::string>>;

TypologyTable bundled(Area area) {
  return TypologyTable::from_file(
      bundled_data_dir() / (area == Area::Syntactic ? "wals_syntactic.tsv" : "wals_morphological.tsv"), area);
}

Partition as_partition(const std::vector<std::vector<std::string>>& members) {
  Partition p;
  for (const auto& c : members) p.emplace(c.begin(), c.end());
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

struct Optimum {
  double inertia = std::numeric_limits<double>::infinity();
  Partition partition;
  std::size_t ties = 0;
};

// Exhaustive search over all partitions into exactly k non-empty blocks.
// Block inertia = sum of pairwise squared distances / block size.
Optimum exhaustive_optimum(std::span<const TypologicalVector> v, std::size_t k) {
  const std::size_t n = v.size();
  std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t b = 0; b < v[i].bits.size(); ++b) {
        const double diff = double(v[i].bits[b]) - double(v[j].bits[b]);
        s += diff * diff;
      }
      d2[i][j] = s;
    }
  }
  Optimum best;
  std::vector<std::size_t> label(n, 0);
  std::vector<double> pair_sum(k, 0.0);
  std::vector<std::size_t> size(k, 0);
  std::vector<std::size_t> best_label;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (n - i < k - used) return;
    if (i == n) {
      double total = 0;
      for (std::size_t c = 0; c < k; ++c) total += pair_sum[c] / double(size[c]);
      if (total < best.inertia - 1e-9) {
        best.inertia = total;
        best_label = label;
        best.ties = 1;
      } else if (total <= best.inertia + 1e-9) {
        ++best.ties;
      }
      return;
    }
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t c = 0; c < limit; ++c) {
      double add = 0;
      for (std::size_t j = 0; j < i; ++j) {
        if (label[j] == c) add += d2[i][j];
      }
      label[i] = c;
      pair_sum[c] += add;
      ++size[c];
      rec(i + 1, std::max(used, c + 1));
      pair_sum[c] -= add;
      --size[c];
    }
  };
  rec(0, 0);
  std::vector<std::vector<std::string>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[best_label[i]].push_back(v[i].language);
  best.partition = as_partition(members);
  return best;
}

const FeatureImpurityTriple* find_feature(const std::vector<FeatureImpurityTriple>& list, const std::string& code) {
  const auto it = std::find_if(list.begin(), list.end(), [&](auto& t) { return t.feature.code == code; });
  return it == list.end() ? nullptr : &*it;
}

const std::vector<std::string> S1{"ita", "fre", "spa", "rom"};
const std::vector<std::string> S2{"eng", "fin", "swe", "rus", "grk"};
const std::vector<std::string> S3{"tur", "prs"};
const std::vector<std::string> S4{"ger", "dut"};
const std::vector<std::string> M1{"ita", "fre", "spa", "rom"};
const std::vector<std::string> M2{"eng", "swe", "ger", "dut"};
const std::vector<std::string> M3{"tur", "fin", "prs", "rus", "grk"};

}  // namespace

TEST_SUITE("typoclusters") {
  TEST_CASE("published syntactic and morphological memberships") {
    const auto start = std::chrono::steady_clock::now();
    const auto synt = bundled(Area::Syntactic);
    const auto morph = bundled(Area::Morphological);
    const auto cs = kmeans(synt.vectors(), Area::Syntactic, {.k = 4});
    const auto cm = kmeans(morph.vectors(), Area::Morphological, {.k = 3});
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));

    CHECK(as_partition(cs.members) == as_partition({S1, S2, S3, S4}));
    CHECK(as_partition(cm.members) == as_partition({M1, M2, M3}));
    // numbering follows first appearance in table order
    CHECK(std::set<std::string>(cs.cluster("S1").begin(), cs.cluster("S1").end()) ==
          std::set<std::string>(S1.begin(), S1.end()));
    CHECK(std::set<std::string>(cs.cluster("S4").begin(), cs.cluster("S4").end()) ==
          std::set<std::string>(S4.begin(), S4.end()));
    CHECK(std::set<std::string>(cm.cluster("M3").begin(), cm.cluster("M3").end()) ==
          std::set<std::string>(M3.begin(), M3.end()));
    CHECK(cs.label(1) == "S2");
    CHECK(cm.label(0) == "M1");
    CHECK(cs.cluster_of("rus") == 1);
  }

  TEST_CASE("k-means reaches the exhaustive optimum") {
    for (auto [area, k] : {std::pair{Area::Morphological, std::size_t{3}}, {Area::Syntactic, std::size_t{4}}}) {
      const auto t = bundled(area);
      const auto oracle = exhaustive_optimum(t.vectors(), k);
      const auto c = kmeans(t.vectors(), area, {.k = k});
      CAPTURE(area_name(area));
      CHECK(c.inertia == doctest::Approx(oracle.inertia).epsilon(1e-12));
      CHECK(clustering_inertia(t.vectors(), c.members) == doctest::Approx(c.inertia).epsilon(1e-12));
      if (oracle.ties == 1) CHECK(as_partition(c.members) == oracle.partition);
    }
  }

  TEST_CASE("partition property, determinism and input-order invariance") {
    const auto t = bundled(Area::Syntactic);
    const auto ref = kmeans(t.vectors(), Area::Syntactic, {.k = 4, .restarts = 100, .seed = 9});
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& c : ref.members) {
      CHECK(!c.empty());
      seen.insert(c.begin(), c.end());
      total += c.size();
    }
    CHECK(total == 13);
    CHECK(seen.size() == 13);

    const auto again = kmeans(t.vectors(), Area::Syntactic, {.k = 4, .restarts = 100, .seed = 9});
    CHECK(again.members == ref.members);
    CHECK(again.inertia == ref.inertia);

    std::vector<TypologicalVector> shuffled(t.vectors().begin(), t.vectors().end());
    std::mt19937 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto c = kmeans(shuffled, Area::Syntactic, {.k = 4, .restarts = 100, .seed = 9});
      CHECK(as_partition(c.members) == as_partition(ref.members));
      CHECK(c.inertia == ref.inertia);
    }
  }

  TEST_CASE("k-means edge cases") {
    const auto t = bundled(Area::Morphological);
    const auto singles = kmeans(t.vectors(), Area::Morphological, {.k = 13, .restarts = 3});
    CHECK(singles.inertia == 0.0);
    for (const auto& c : singles.members) CHECK(c.size() == 1);
    const auto one = kmeans(t.vectors(), Area::Morphological, {.k = 1, .restarts = 2});
    CHECK(one.members.size() == 1);
    CHECK(one.members[0].size() == 13);
    CHECK(code_of([&] { kmeans(t.vectors(), Area::Morphological, {.k = 14}); }) == ErrorCode::BadClusterCount);
    CHECK(code_of([&] { kmeans(t.vectors(), Area::Morphological, {.k = 0}); }) == ErrorCode::BadClusterCount);
    const auto s = bundled(Area::Syntactic);
    const std::vector<TypologicalVector> mixed{t.vector("ita"), s.vector("eng")};
    CHECK(code_of([&] { kmeans(mixed, Area::Morphological, {.k = 1}); }) == ErrorCode::SpaceMismatch);
    CHECK(default_cluster_count(Area::Syntactic) == 4);
    CHECK(default_cluster_count(Area::Morphological) == 3);
  }

  TEST_CASE("gini") {
    const std::vector<int> pure{2, 2, 2, 2};
    const std::vector<int> half{1, 1, 2, 2};
    const std::vector<int> skew{1, 1, 1, 2};
    const std::vector<int> none;
    CHECK(gini(pure) == 0.0);
    CHECK(gini(half) == 0.5);
    CHECK(gini(skew) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(code_of([&] { gini(none); }) == ErrorCode::EmptySet);

    std::mt19937 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<int> len(1, 20), val(1, 5);
      std::vector<int> v(len(rng));
      for (auto& x : v) x = val(rng);
      const double g = gini(v);
      const double m = static_cast<double>(std::set<int>(v.begin(), v.end()).size());
      CHECK(g >= 0.0);
      CHECK(g <= 1.0 - 1.0 / m + 1e-15);
      CHECK((g == 0.0) == (m == 1.0));
    }
  }

  TEST_CASE("S1 vs S2 features") {
    const auto t = bundled(Area::Syntactic);
    const auto distinctive = distinctive_features(S1, S2, t);
    const auto* f87 = find_feature(distinctive, "87A");
    REQUIRE(f87 != nullptr);
    CHECK(f87->gini_c1 == 0.0);
    CHECK(f87->gini_c2 == 0.0);
    CHECK(f87->gini_union == doctest::Approx(1.0 - (16.0 + 25.0) / 81.0).epsilon(1e-15));
    CHECK(f87->polarizing);
    REQUIRE(find_feature(distinctive, "97A") != nullptr);
    CHECK(find_feature(distinctive, "97A")->polarizing);

    const auto polar = polarizing_features(S1, S2, t);
    std::set<std::string> polar_codes;
    for (const auto& f : polar) polar_codes.insert(f.code);
    CHECK(polar_codes.count("87A") == 1);
    CHECK(polar_codes.count("97A") == 1);

    for (std::size_t i = 1; i < distinctive.size(); ++i) CHECK(distinctive[i - 1].margin() >= distinctive[i].margin());
    for (const auto& f : distinctive) {
      CHECK(f.gini_c1 < f.gini_union);
      CHECK(f.gini_c2 < f.gini_union);
      CHECK(!(f.polarizing && f.nearly_polarizing));
      CHECK(f.polarizing == (polar_codes.count(f.feature.code) == 1));
    }
    for (const auto& code : polar_codes) CHECK(find_feature(distinctive, code) != nullptr);
  }

  TEST_CASE("M1 vs M3 features") {
    const auto t = bundled(Area::Morphological);
    const auto distinctive = distinctive_features(M1, M3, t);
    const auto* f29 = find_feature(distinctive, "29A");
    REQUIRE(f29 != nullptr);
    CHECK(f29->polarizing);
    REQUIRE(find_feature(distinctive, "21A") != nullptr);
    REQUIRE(find_feature(distinctive, "23A") != nullptr);
    const auto polar = polarizing_features(M1, M3, t);
    CHECK(std::any_of(polar.begin(), polar.end(), [](auto& f) { return f.code == "29A"; }));
  }

  TEST_CASE("constant features and identical singletons are excluded") {
    const auto t = bundled(Area::Syntactic);
    const std::vector<std::string> a{"ita"}, b{"spa"};
    CHECK(t.sigma("ita", "spa") == 1.0);
    CHECK(distinctive_features(a, b, t).empty());
    CHECK(polarizing_features(a, b, t).empty());
  }

  TEST_CASE("extra_cluster_pairs") {
    CHECK(extra_cluster_pairs(S1, S2).size() == 20);
    CHECK(extra_cluster_pairs(S3, S4).size() == 4);
    CHECK(extra_cluster_pairs(M1, M3).size() == 20);
    const auto pairs = extra_cluster_pairs(S1, S2);
    CHECK(std::is_sorted(pairs.begin(), pairs.end()));
    CHECK(std::set<LanguagePair>(pairs.begin(), pairs.end()).size() == 20);
    std::vector<std::string> rev1(S1.rbegin(), S1.rend());
    CHECK(extra_cluster_pairs(rev1, S2) == pairs);
    CHECK(extra_cluster_pairs(S2, S1) == pairs);
    const std::vector<std::string> overlap{"ita", "eng"};
    CHECK(code_of([&] { extra_cluster_pairs(S1, overlap); }) == ErrorCode::ClustersOverlap);
    const auto t = bundled(Area::Syntactic);
    CHECK(code_of([&] { distinctive_features(S1, overlap, t); }) == ErrorCode::ClustersOverlap);
  }
}
