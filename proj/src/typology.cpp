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

#include "typology.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace typosim {
namespace {

const std::array<FeatureId, 30> kCatalog = {{
    {"20A", Area::Morphological, "Fusion of Selected Inflectional Formatives"},
    {"21A", Area::Morphological, "Exponence of Selected Inflectional Formatives"},
    {"21B", Area::Morphological, "Exponence of Tense-Aspect-Mood Inflection"},
    {"22A", Area::Morphological, "Inflectional Synthesis of the Verb"},
    {"23A", Area::Morphological, "Locus of Marking in the Clause"},
    {"24A", Area::Morphological, "Locus of Marking in Possessive Noun Phrases"},
    {"25A", Area::Morphological, "Locus of Marking: Whole-language Typology"},
    {"25B", Area::Morphological, "Zero Marking of A and P Arguments"},
    {"26A", Area::Morphological, "Prefixing vs. Suffixing in Inflectional Morphology"},
    {"27A", Area::Morphological, "Reduplication"},
    {"28A", Area::Morphological, "Case Syncretism"},
    {"29A", Area::Morphological, "Syncretism in Verbal Person/Number Marking"},
    {"81A", Area::Syntactic, "Order of Subject, Object and Verb"},
    {"82A", Area::Syntactic, "Order of Subject and Verb"},
    {"83A", Area::Syntactic, "Order of Object and Verb"},
    {"84A", Area::Syntactic, "Order of Object, Oblique, and Verb"},
    {"85A", Area::Syntactic, "Order of Adposition and Noun Phrase"},
    {"86A", Area::Syntactic, "Order of Genitive and Noun"},
    {"87A", Area::Syntactic, "Order of Adjective and Noun"},
    {"88A", Area::Syntactic, "Order of Demonstrative and Noun"},
    {"92A", Area::Syntactic, "Position of Polar Question Particles"},
    {"93A", Area::Syntactic, "Position of Interrogative Phrases in Content Questions"},
    {"94A", Area::Syntactic, "Order of Adverbial Subordinator and Clause"},
    {"95A", Area::Syntactic,
     "Relationship between the Order of Object and Verb and the Order of Adposition and Noun "
     "Phrase"},
    {"96A", Area::Syntactic,
     "Relationship between the Order of Object and Verb and the Order of Relative Clause and "
     "Noun"},
    {"97A", Area::Syntactic,
     "Relationship between the Order of Object and Verb and the Order of Adjective and Noun"},
    {"143A", Area::Syntactic, "Order of Negative Morpheme and Verb"},
    {"143E", Area::Syntactic, "Preverbal Negative Morphemes"},
    {"143F", Area::Syntactic, "Postverbal Negative Morphemes"},
    {"144A", Area::Syntactic,
     "Position of Negative Word With Respect to Subject, Object, and Verb"},
}};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Collapses internal runs of whitespace so labels compare cleanly.
std::string squeeze_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::uint64_t fingerprint(Area area, const std::vector<Dimension>& dims) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(area_name(area));
  for (const auto& d : dims) {
    mix("|");
    mix(d.feature);
    mix(":");
    mix(std::to_string(d.value_index));
  }
  return h;
}

}  // namespace

std::string_view area_name(Area area) noexcept {
  return area == Area::Morphological ? "morphological" : "syntactic";
}

Area parse_area(std::string_view text) {
  if (text == "morphological" || text == "morph") return Area::Morphological;
  if (text == "syntactic" || text == "synt" || text == "syntax") return Area::Syntactic;
  fail(ErrorCode::InvalidArgument, "unknown typological area '" + std::string(text) + "'");
}

std::span<const FeatureId> feature_catalog() noexcept { return kCatalog; }

std::optional<FeatureId> lookup_feature(std::string_view code) {
  for (const auto& f : kCatalog) {
    if (f.code == code) return f;
  }
  return std::nullopt;
}

bool feature_code_less(std::string_view a, std::string_view b) noexcept {
  const auto split_code = [](std::string_view s) {
    std::size_t i = 0;
    long number = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      number = number * 10 + (s[i] - '0');
      ++i;
    }
    return std::pair{i == 0 ? -1L : number, s.substr(i)};
  };
  const auto [na, sa] = split_code(a);
  const auto [nb, sb] = split_code(b);
  if (na != nb) return na < nb;
  return sa < sb;
}

const FeatureValue& LanguageProfile::value(std::string_view feature) const {
  const auto it = assignments.find(std::string(feature));
  if (it == assignments.end()) {
    fail(ErrorCode::MissingFeature, "language '" + code + "' has no value for " + std::string(feature));
  }
  return it->second;
}

std::string normalize_language_code(std::string_view code) {
  std::string out(trim(code));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<LanguageProfile> load_profiles(std::istream& source, Area area) {
  std::vector<LanguageProfile> profiles;
  std::vector<std::string> features;
  char delim = '\t';
  bool have_header = false;
  std::set<std::string> seen_languages;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;

    if (!have_header) {
      delim = line.find('\t') != std::string::npos ? '\t' : '|';
      const auto cols = split(line, delim);
      if (cols.empty() || cols.front() != "wals_code") {
        fail(ErrorCode::MalformedValue, "table header must start with 'wals_code'");
      }
      std::set<std::string> unique;
      for (std::size_t i = 1; i < cols.size(); ++i) {
        std::string code(cols[i]);
        if (code.empty()) fail(ErrorCode::MalformedValue, "empty feature column name");
        if (!unique.insert(code).second) {
          fail(ErrorCode::MalformedValue, "feature " + code + " appears twice in header");
        }
        if (const auto known = lookup_feature(code); known && known->area != area) {
          fail(ErrorCode::SpaceMismatch, "feature " + code + " belongs to the " +
                                             std::string(area_name(known->area)) + " area");
        }
        features.push_back(std::move(code));
      }
      have_header = true;
      continue;
    }

    const auto cells = split(line, delim);
    LanguageProfile profile;
    profile.code = normalize_language_code(cells.front());
    profile.area = area;
    if (profile.code.empty()) {
      fail(ErrorCode::MalformedValue, "line " + std::to_string(line_no) + ": empty wals_code");
    }
    if (!seen_languages.insert(profile.code).second) {
      fail(ErrorCode::MalformedValue, "language '" + profile.code + "' appears twice");
    }
    if (cells.size() > features.size() + 1) {
      fail(ErrorCode::MalformedValue, "line " + std::to_string(line_no) + ": more cells than features");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
      const std::string_view cell = i + 1 < cells.size() ? cells[i + 1] : std::string_view{};
      if (cell.empty()) {
        fail(ErrorCode::MissingFeature, "(" + profile.code + ", " + features[i] + ")");
      }
      int index = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), index);
      const bool boundary = ptr == cell.data() + cell.size() || *ptr == ' ' || *ptr == '\t' ||
                            *ptr == '.';
      if (ec != std::errc{} || !boundary || index < 1) {
        fail(ErrorCode::MalformedValue,
             "(" + profile.code + ", " + features[i] + "): '" + std::string(cell) + "'");
      }
      profile.assignments.emplace(features[i],
                                  FeatureValue{features[i], index, squeeze_spaces(cell)});
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

std::vector<LanguageProfile> load_profiles(const std::filesystem::path& path, Area area) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return load_profiles(in, area);
}

bool dimension_less(const Dimension& a, const Dimension& b) noexcept {
  if (a.feature != b.feature) return feature_code_less(a.feature, b.feature);
  return a.value_index < b.value_index;
}

std::optional<std::size_t> TypologicalSpace::index_of(const Dimension& dim) const {
  const auto it = std::lower_bound(dims.begin(), dims.end(), dim, dimension_less);
  if (it == dims.end() || !(*it == dim)) return std::nullopt;
  return static_cast<std::size_t>(it - dims.begin());
}

TypologicalSpace build_space(std::span<const LanguageProfile> profiles, Area area) {
  TypologicalSpace space;
  space.area = area;
  if (!profiles.empty()) {
    for (const auto& [code, _] : profiles.front().assignments) space.features.push_back(code);
    std::sort(space.features.begin(), space.features.end(),
              [](const auto& a, const auto& b) { return feature_code_less(a, b); });
  }
  for (const auto& p : profiles) {
    if (p.area != area) {
      fail(ErrorCode::SpaceMismatch, "profile '" + p.code + "' is " + std::string(area_name(p.area)));
    }
    if (p.assignments.size() != space.features.size() ||
        !std::all_of(space.features.begin(), space.features.end(),
                     [&p](const auto& f) { return p.assignments.count(f) == 1; })) {
      fail(ErrorCode::SpaceMismatch, "profile '" + p.code + "' covers a different feature set");
    }
    for (const auto& [code, value] : p.assignments) {
      space.dims.push_back({code, value.value_index});
    }
  }
  std::sort(space.dims.begin(), space.dims.end(), dimension_less);
  space.dims.erase(std::unique(space.dims.begin(), space.dims.end()), space.dims.end());
  space.id = fingerprint(area, space.dims);
  return space;
}

std::size_t TypologicalVector::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

TypologicalVector encode(const LanguageProfile& profile, const TypologicalSpace& space) {
  if (profile.area != space.area) {
    fail(ErrorCode::SpaceMismatch, "profile '" + profile.code + "' is not in the " +
                                       std::string(area_name(space.area)) + " space");
  }
  TypologicalVector v;
  v.language = profile.code;
  v.space_id = space.id;
  v.bits.assign(space.dims.size(), 0);
  for (const auto& feature : space.features) {
    if (profile.assignments.count(feature) == 0) {
      fail(ErrorCode::MissingFeature, "(" + profile.code + ", " + feature + ")");
    }
  }
  for (const auto& [code, value] : profile.assignments) {
    const auto idx = space.index_of({code, value.value_index});
    if (!idx) {
      fail(ErrorCode::UnknownDimension,
           "(" + profile.code + ") " + code + "=" + std::to_string(value.value_index));
    }
    v.bits[*idx] = 1;
  }
  return v;
}

std::map<std::string, int> decode(const TypologicalVector& vector, const TypologicalSpace& space) {
  if (vector.space_id != space.id || vector.bits.size() != space.dims.size()) {
    fail(ErrorCode::SpaceMismatch, "vector '" + vector.language + "' belongs to another space");
  }
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < vector.bits.size(); ++i) {
    if (vector.bits[i]) out[space.dims[i].feature] = space.dims[i].value_index;
  }
  return out;
}

double similarity(const TypologicalVector& a, const TypologicalVector& b) {
  if (a.space_id != b.space_id || a.bits.size() != b.bits.size()) {
    fail(ErrorCode::SpaceMismatch, "'" + a.language + "' and '" + b.language +
                                       "' are encoded in different spaces");
  }
  std::size_t shared = 0;
  std::size_t na = 0;
  std::size_t nb = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    shared += a.bits[i] & b.bits[i];
    na += a.bits[i];
    nb += b.bits[i];
  }
  if (na == 0 || nb == 0) fail(ErrorCode::DegenerateInput, "empty typological vector");
  if (na == nb) return static_cast<double>(shared) / static_cast<double>(na);
  return static_cast<double>(shared) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
}

LanguagePair LanguagePair::make(std::string_view a, std::string_view b) {
  std::string x = normalize_language_code(a);
  std::string y = normalize_language_code(b);
  if (x == y) fail(ErrorCode::InvalidArgument, "pair of identical languages '" + x + "'");
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

std::vector<RankedPair> pair_ranking(std::span<const TypologicalVector> vectors) {
  if (vectors.size() < 2) {
    fail(ErrorCode::InsufficientLanguages, "need at least 2 languages, got " +
                                               std::to_string(vectors.size()));
  }
  std::vector<RankedPair> out;
  out.reserve(vectors.size() * (vectors.size() - 1) / 2);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      out.push_back({LanguagePair::make(vectors[i].language, vectors[j].language),
                     similarity(vectors[i], vectors[j])});
    }
  }
  std::sort(out.begin(), out.end(), [](const RankedPair& a, const RankedPair& b) {
    if (a.sigma != b.sigma) return a.sigma > b.sigma;
    return a.pair.label() < b.pair.label();
  });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].pair == out[i - 1].pair) {
      fail(ErrorCode::InvalidArgument, "language '" + out[i].pair.first + "' listed twice");
    }
  }
  return out;
}

TypologyTable::TypologyTable(Area area, std::vector<LanguageProfile> profiles)
    : area_(area), profiles_(std::move(profiles)), space_(build_space(profiles_, area)) {
  vectors_.reserve(profiles_.size());
  for (const auto& p : profiles_) vectors_.push_back(encode(p, space_));
}

TypologyTable TypologyTable::from_file(const std::filesystem::path& path, Area area) {
  return TypologyTable(area, load_profiles(path, area));
}

std::vector<std::string> TypologyTable::languages() const {
  std::vector<std::string> out;
  out.reserve(profiles_.size());
  for (const auto& p : profiles_) out.push_back(p.code);
  return out;
}

std::size_t TypologyTable::index_of(std::string_view code) const {
  const auto key = normalize_language_code(code);
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    if (profiles_[i].code == key) return i;
  }
  fail(ErrorCode::InvalidArgument, "language '" + key + "' is not in the " +
                                       std::string(area_name(area_)) + " table");
}

bool TypologyTable::contains(std::string_view code) const {
  const auto key = normalize_language_code(code);
  return std::any_of(profiles_.begin(), profiles_.end(),
                     [&key](const auto& p) { return p.code == key; });
}

const LanguageProfile& TypologyTable::profile(std::string_view code) const {
  return profiles_[index_of(code)];
}

const TypologicalVector& TypologyTable::vector(std::string_view code) const {
  return vectors_[index_of(code)];
}

double TypologyTable::sigma(std::string_view a, std::string_view b) const {
  return similarity(vector(a), vector(b));
}

std::vector<TypologicalVector> TypologyTable::select(std::span<const std::string> codes) const {
  std::set<std::string> wanted;
  for (const auto& c : codes) {
    index_of(c);
    wanted.insert(normalize_language_code(c));
  }
  std::vector<TypologicalVector> out;
  for (const auto& v : vectors_) {
    if (wanted.count(v.language)) out.push_back(v);
  }
  return out;
}

}  // namespace typosim
