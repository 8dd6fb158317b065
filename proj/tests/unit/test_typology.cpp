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
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "error.hpp"
#include "runner/config.hpp"
#include "typology.hpp"
#include "unit/oracles.hpp"

using namespace typosim;

namespace {

std::filesystem::path table_path(Area area) {
  return bundled_data_dir() / (area == Area::Syntactic ? "wals_syntactic.tsv" : "wals_morphological.tsv");
}

std::map<std::string, std::vector<int>> raw_cells(Area area) { return oracle::raw_cells(table_path(area)); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_SUITE("typology") {
  TEST_CASE("load_profiles reads appendix rows") {
    const auto morph = load_profiles(table_path(Area::Morphological), Area::Morphological);
    const auto synt = load_profiles(table_path(Area::Syntactic), Area::Syntactic);
    REQUIRE(morph.size() == 13);
    REQUIRE(synt.size() == 13);
    const auto& ita = *std::find_if(morph.begin(), morph.end(), [](auto& p) { return p.code == "ita"; });
    CHECK(ita.value("20A").value_index == 1);
    CHECK(ita.value("20A").label == "1 Exclusively concatenative");
    const auto& ger = *std::find_if(synt.begin(), synt.end(), [](auto& p) { return p.code == "ger"; });
    CHECK(ger.value("81A").value_index == 7);
    CHECK(ger.value("81A").label == "7 No dominant order");
  }

  TEST_CASE("load_profiles edge cases") {
    std::istringstream empty("wals_code\t81A\n");
    CHECK(load_profiles(empty, Area::Syntactic).empty());

    std::istringstream pipes("wals_code|81A|82A\nxxx|2 SVO|1 SV\n");
    const auto p = load_profiles(pipes, Area::Syntactic);
    REQUIRE(p.size() == 1);
    CHECK(p[0].value("82A").value_index == 1);

    CHECK(code_of([] {
            std::istringstream in("wals_code\t81A\t82A\nxxx\t2 SVO\t\n");
            load_profiles(in, Area::Syntactic);
          }) == ErrorCode::MissingFeature);
    CHECK(code_of([] {
            std::istringstream in("wals_code\t81A\nxxx\tSVO\n");
            load_profiles(in, Area::Syntactic);
          }) == ErrorCode::MalformedValue);
    CHECK(code_of([] {
            std::istringstream in("wals_code\t81A\nxxx\t0 Nothing\n");
            load_profiles(in, Area::Syntactic);
          }) == ErrorCode::MalformedValue);
  }

  TEST_CASE("build_space dimensions") {
    const auto synt = load_profiles(table_path(Area::Syntactic), Area::Syntactic);
    const auto space = build_space(synt, Area::Syntactic);
    CHECK(space.index_of({"87A", 1}).has_value());
    CHECK(space.index_of({"87A", 2}).has_value());
    CHECK(std::is_sorted(space.dims.begin(), space.dims.end(), dimension_less));
    CHECK(std::adjacent_find(space.dims.begin(), space.dims.end()) == space.dims.end());

    const std::vector<LanguageProfile> one{synt[0]};
    CHECK(build_space(one, Area::Syntactic).dims.size() == 18);

    // two languages differing on exactly one feature
    auto other = synt[0];
    other.code = "zzz";
    auto& v = other.assignments.at("81A");
    v.value_index = v.value_index == 1 ? 2 : 1;
    const std::vector<LanguageProfile> two{synt[0], other};
    CHECK(build_space(two, Area::Syntactic).dims.size() == 19);

    auto short_profile = synt[1];
    short_profile.assignments.erase("81A");
    const std::vector<LanguageProfile> mixed{synt[0], short_profile};
    CHECK(code_of([&] { build_space(mixed, Area::Syntactic); }) == ErrorCode::SpaceMismatch);
  }

  TEST_CASE("encode, decode, unknown dimension") {
    const auto synt = TypologyTable::from_file(table_path(Area::Syntactic), Area::Syntactic);
    const auto morph = TypologyTable::from_file(table_path(Area::Morphological), Area::Morphological);
    CHECK(synt.vector("ita").popcount() == 18);
    CHECK(morph.vector("ita").popcount() == 12);
    for (const auto& p : synt.profiles()) {
      const auto decoded = decode(encode(p, synt.space()), synt.space());
      for (const auto& [f, v] : p.assignments) CHECK(decoded.at(f) == v.value_index);
    }
    auto odd = synt.profile("ita");
    odd.assignments.at("81A").value_index = 99;
    CHECK(code_of([&] { encode(odd, synt.space()); }) == ErrorCode::UnknownDimension);
    CHECK(code_of([&] { similarity(synt.vector("ita"), morph.vector("ita")); }) == ErrorCode::SpaceMismatch);
  }

  TEST_CASE("encode is injective on the bundled tables") {
    for (auto area : {Area::Syntactic, Area::Morphological}) {
      const auto t = TypologyTable::from_file(table_path(area), area);
      std::map<std::vector<std::uint8_t>, std::map<std::string, int>> seen;
      for (const auto& p : t.profiles()) {
        std::map<std::string, int> assignment;
        for (const auto& [f, v] : p.assignments) assignment[f] = v.value_index;
        const auto [it, fresh] = seen.emplace(t.vector(p.code).bits, assignment);
        if (!fresh) CHECK(it->second == assignment);
      }
    }
  }

  TEST_CASE("similarity equals cell-comparison oracle for all 78 pairs") {
    for (auto area : {Area::Syntactic, Area::Morphological}) {
      const auto t = TypologyTable::from_file(table_path(area), area);
      const auto cells = raw_cells(area);
      REQUIRE(cells.size() == 13);
      std::size_t checked = 0;
      for (auto a = cells.begin(); a != cells.end(); ++a) {
        for (auto b = std::next(a); b != cells.end(); ++b) {
          std::size_t match = 0;
          for (std::size_t i = 0; i < a->second.size(); ++i) match += a->second[i] == b->second[i];
          const double expected = static_cast<double>(match) / static_cast<double>(a->second.size());
          CHECK(t.sigma(a->first, b->first) == expected);
          CHECK(t.sigma(b->first, a->first) == t.sigma(a->first, b->first));
          ++checked;
        }
        CHECK(t.sigma(a->first, a->first) == 1.0);
      }
      CHECK(checked == 78);
    }
  }

  TEST_CASE("published similarity examples") {
    const auto t = TypologyTable::from_file(table_path(Area::Syntactic), Area::Syntactic);
    CHECK(t.sigma("ita", "spa") == 1.0);
    CHECK(t.sigma("ita", "eng") == 14.0 / 18.0);
  }

  TEST_CASE("similarity is 1 iff profiles are identical") {
    for (auto area : {Area::Syntactic, Area::Morphological}) {
      const auto t = TypologyTable::from_file(table_path(area), area);
      for (const auto& a : t.profiles()) {
        for (const auto& b : t.profiles()) {
          const bool same = a.assignments.size() == b.assignments.size() &&
                            std::equal(a.assignments.begin(), a.assignments.end(), b.assignments.begin(),
                                       [](auto& x, auto& y) { return x.second.value_index == y.second.value_index; });
          const double s = t.sigma(a.code, b.code);
          CHECK((s == 1.0) == same);
          CHECK(s >= 0.0);
          CHECK(s <= 1.0);
        }
      }
    }
  }

  TEST_CASE("pair_ranking") {
    const auto t = TypologyTable::from_file(table_path(Area::Syntactic), Area::Syntactic);
    const auto ranking = pair_ranking(t.vectors());
    CHECK(ranking.size() == 78);
    std::set<LanguagePair> unique;
    for (const auto& r : ranking) unique.insert(r.pair);
    CHECK(unique.size() == 78);
    for (std::size_t i = 1; i < ranking.size(); ++i) {
      const auto& a = ranking[i - 1];
      const auto& b = ranking[i];
      CHECK((a.sigma > b.sigma || (a.sigma == b.sigma && a.pair.label() < b.pair.label())));
    }
    auto pos = [&](const char* x, const char* y) {
      const auto p = LanguagePair::make(x, y);
      return std::find_if(ranking.begin(), ranking.end(), [&](auto& r) { return r.pair == p; }) - ranking.begin();
    };
    CHECK(pos("ita", "spa") < pos("ita", "eng"));

    std::vector<TypologicalVector> shuffled(t.vectors().begin(), t.vectors().end());
    std::mt19937 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto again = pair_ranking(shuffled);
      REQUIRE(again.size() == ranking.size());
      for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].pair == ranking[i].pair);
        CHECK(again[i].sigma == ranking[i].sigma);
      }
    }

    const std::vector<TypologicalVector> two{t.vector("ita"), t.vector("eng")};
    CHECK(pair_ranking(two).size() == 1);
    const std::vector<TypologicalVector> one{t.vector("ita")};
    CHECK(code_of([&] { pair_ranking(one); }) == ErrorCode::InsufficientLanguages);
  }
}
