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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace typosim {

enum class Area { Morphological, Syntactic };

std::string_view area_name(Area area) noexcept;
Area parse_area(std::string_view text);

struct FeatureId {
  std::string code;
  Area area = Area::Syntactic;
  std::string name;
};

// Known WALS features with their descriptive names, in appendix order.
std::span<const FeatureId> feature_catalog() noexcept;
std::optional<FeatureId> lookup_feature(std::string_view code);

// Orders "20A" < "21A" < "21B" < "81A" < "143A": numeric prefix first.
bool feature_code_less(std::string_view a, std::string_view b) noexcept;

struct FeatureValue {
  std::string feature;
  int value_index = 0;  // >= 1
  std::string label;    // cell text as printed, e.g. "2 SVO"
};

struct LanguageProfile {
  std::string code;
  Area area = Area::Syntactic;
  std::map<std::string, FeatureValue> assignments;  // feature code -> value

  const FeatureValue& value(std::string_view feature) const;
};

std::string normalize_language_code(std::string_view code);

/// Parses a WALS-style delimited table (tab- or pipe-separated). The first
/// column is `wals_code`, every other column is named by a feature code and
/// each cell starts with the numeric value index.
std::vector<LanguageProfile> load_profiles(std::istream& source, Area area);
std::vector<LanguageProfile> load_profiles(const std::filesystem::path& path, Area area);

struct Dimension {
  std::string feature;
  int value_index = 0;

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

bool dimension_less(const Dimension& a, const Dimension& b) noexcept;

struct TypologicalSpace {
  Area area = Area::Syntactic;
  std::vector<std::string> features;  // sorted by feature_code_less
  std::vector<Dimension> dims;        // sorted by (feature, value_index)
  std::uint64_t id = 0;               // fingerprint of (area, dims)

  std::optional<std::size_t> index_of(const Dimension& dim) const;
};

TypologicalSpace build_space(std::span<const LanguageProfile> profiles, Area area);

struct TypologicalVector {
  std::string language;
  std::uint64_t space_id = 0;
  std::vector<std::uint8_t> bits;

  std::size_t popcount() const noexcept;
};

TypologicalVector encode(const LanguageProfile& profile, const TypologicalSpace& space);

// Inverse of encode: feature code -> value index of the set bits.
std::map<std::string, int> decode(const TypologicalVector& vector,
                                  const TypologicalSpace& space);

/// Cosine similarity of two boolean vectors of the same space. With one value
/// per feature this is the fraction of shared feature-value pairs.
double similarity(const TypologicalVector& a, const TypologicalVector& b);

struct LanguagePair {
  std::string first;   // first < second
  std::string second;

  static LanguagePair make(std::string_view a, std::string_view b);
  std::string label() const { return first + "-" + second; }

  friend auto operator<=>(const LanguagePair&, const LanguagePair&) = default;
};

struct RankedPair {
  LanguagePair pair;
  double sigma = 0.0;
};

/// All unordered pairs sorted by similarity descending, ties broken by the
/// "a-b" label ascending.
std::vector<RankedPair> pair_ranking(std::span<const TypologicalVector> vectors);

/// Profiles, space and vectors for one area, kept in table row order.
class TypologyTable {
 public:
  TypologyTable(Area area, std::vector<LanguageProfile> profiles);

  static TypologyTable from_file(const std::filesystem::path& path, Area area);

  Area area() const noexcept { return area_; }
  const TypologicalSpace& space() const noexcept { return space_; }
  std::span<const LanguageProfile> profiles() const noexcept { return profiles_; }
  std::span<const TypologicalVector> vectors() const noexcept { return vectors_; }
  std::vector<std::string> languages() const;

  bool contains(std::string_view code) const;
  const LanguageProfile& profile(std::string_view code) const;
  const TypologicalVector& vector(std::string_view code) const;
  double sigma(std::string_view a, std::string_view b) const;

  // Restricts to the given languages, preserving table order.
  std::vector<TypologicalVector> select(std::span<const std::string> codes) const;

 private:
  std::size_t index_of(std::string_view code) const;

  Area area_;
  std::vector<LanguageProfile> profiles_;
  TypologicalSpace space_;
  std::vector<TypologicalVector> vectors_;
};

}  // namespace typosim
