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

#include "runner/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace typosim {
namespace {

using ojson = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') fail(ErrorCode::MalformedValue, "bad number '" + text + "' in grid CSV");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string hex_color(const std::array<int, 3>& rgb) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

ojson json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

ojson triple_json(const FeatureImpurityTriple& t) {
  return ojson{{"feature", t.feature.code},
               {"name", t.feature.name},
               {"gini_c1", t.gini_c1},
               {"gini_c2", t.gini_c2},
               {"gini_union", t.gini_union},
               {"margin", t.margin()},
               {"polarizing", t.polarizing},
               {"nearly_polarizing", t.nearly_polarizing}};
}

}  // namespace

std::string grid_to_csv(const CorrelationGrid& grid) {
  std::string out;
  out += "# space=" + std::string(area_name(grid.space)) + "\n";
  out += "# pair_set=" + grid.pair_set + "\n";
  out += "# n=" + std::to_string(grid.n) + "\n";
  out += "matrix";
  for (int layer = 0; layer < kLayerCount; ++layer) out += "," + std::to_string(layer);
  out += "\n";
  for (auto kind : kAllKinds) {
    out += kind_name(kind);
    for (int layer = 0; layer < kLayerCount; ++layer) {
      const auto& c = grid.cell(kind, layer);
      out += "," + g17(c.rho) + ";" + g17(c.p);
    }
    out += "\n";
  }
  return out;
}

CorrelationGrid parse_grid_csv(const std::string& text) {
  CorrelationGrid grid;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::array<bool, kKindCount> seen{};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const auto value = line.substr(eq + 1);
      if (key == "space") grid.space = parse_area(value);
      else if (key == "pair_set") grid.pair_set = value;
      else if (key == "n") grid.n = std::stoul(value);
      continue;
    }
    const auto fields = split(line, ',');
    if (!header) {
      if (fields.size() != kLayerCount + 1 || fields[0] != "matrix") {
        fail(ErrorCode::MalformedValue, "grid CSV header must be matrix,0..11");
      }
      for (int layer = 0; layer < kLayerCount; ++layer) {
        if (fields[static_cast<std::size_t>(layer) + 1] != std::to_string(layer)) {
          fail(ErrorCode::MalformedValue, "grid CSV header must list layers 0..11 in order");
        }
      }
      header = true;
      continue;
    }
    if (fields.size() != kLayerCount + 1) fail(ErrorCode::MalformedValue, "grid CSV row has wrong width: " + line);
    const auto kind = parse_kind(fields[0]);
    seen[kind_index(kind)] = true;
    for (int layer = 0; layer < kLayerCount; ++layer) {
      const auto parts = split(fields[static_cast<std::size_t>(layer) + 1], ';');
      if (parts.size() != 2) fail(ErrorCode::MalformedValue, "grid CSV cell must be rho;p");
      auto& c = grid.cell(kind, layer);
      c.kind = kind;
      c.layer = layer;
      c.rho = parse_double(parts[0]);
      c.p = parse_double(parts[1]);
      c.n = grid.n;
    }
  }
  if (!header || !std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    fail(ErrorCode::MalformedValue, "grid CSV must hold all six matrix rows");
  }
  return grid;
}

std::string pair_table_to_csv(const PairSimilarityTable& table) {
  std::string out = "# centering=" + std::string(centering_name(table.centering)) + "\n";
  for (const auto& [lang, digest] : table.digests) out += "# digest " + lang + "=" + digest + "\n";
  out += "pair,sigma_synt,sigma_morph";
  for (auto kind : kAllKinds) {
    for (int layer = 0; layer < kLayerCount; ++layer) out += "," + std::string(kind_name(kind)) + std::to_string(layer);
  }
  out += "\n";
  for (const auto& row : table.rows) {
    out += row.pair.label() + "," + g17(row.sigma_synt) + "," + g17(row.sigma_morph);
    for (double s : row.scores) out += "," + g17(s);
    out += "\n";
  }
  return out;
}

std::array<int, 3> diverging_color(double rho) {
  if (!std::isfinite(rho)) return {96, 96, 96};
  const double r = std::clamp(rho, -1.0, 1.0);
  const int level = static_cast<int>(std::lround(255.0 * std::abs(r)));
  return r >= 0.0 ? std::array<int, 3>{level, 0, 0} : std::array<int, 3>{0, 0, level};
}

std::string grid_to_svg(const CorrelationGrid& grid, const std::string& title, double significance) {
  constexpr int kCellW = 56, kCellH = 34, kLeft = 56, kTop = 54, kLegendH = 14;
  const int width = kLeft + kCellW * kLayerCount + 16;
  const int height = kTop + kCellH * static_cast<int>(kKindCount) + 70;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"22\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  s << "<text x=\"" << kLeft << "\" y=\"38\" font-size=\"11\" fill=\"#444\">n = " << grid.n
    << " pairs; * p &lt; " << xml_escape(fixed(significance, 3)) << "</text>\n";
  for (int layer = 0; layer < kLayerCount; ++layer) {
    s << "<text x=\"" << kLeft + kCellW * layer + kCellW / 2 << "\" y=\"" << kTop - 4
      << "\" font-size=\"11\" text-anchor=\"middle\">" << layer << "</text>\n";
  }
  for (std::size_t k = 0; k < kKindCount; ++k) {
    const auto kind = kAllKinds[k];
    const int y = kTop + kCellH * static_cast<int>(k);
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + kCellH / 2 + 4
      << "\" font-size=\"12\" text-anchor=\"end\">" << kind_name(kind) << "</text>\n";
    for (int layer = 0; layer < kLayerCount; ++layer) {
      const auto& c = grid.cell(kind, layer);
      const int x = kLeft + kCellW * layer;
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCellW << "\" height=\"" << kCellH
        << "\" fill=\"" << hex_color(diverging_color(c.rho)) << "\" stroke=\"white\" stroke-width=\"1\"/>\n";
      const std::string label = std::isfinite(c.rho) ? fixed(c.rho, 2) : "n/a";
      const bool star = std::isfinite(c.p) && c.p < significance;
      s << "<text x=\"" << x + kCellW / 2 << "\" y=\"" << y + kCellH / 2 + 4
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"white\">" << label << (star ? "*" : "")
        << "</text>\n";
    }
  }
  const int ly = kTop + kCellH * static_cast<int>(kKindCount) + 24;
  s << "<defs><linearGradient id=\"scale\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">"
    << "<stop offset=\"0\" stop-color=\"#0000ff\"/><stop offset=\"0.5\" stop-color=\"#000000\"/>"
    << "<stop offset=\"1\" stop-color=\"#ff0000\"/></linearGradient></defs>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << ly << "\" width=\"" << kCellW * kLayerCount << "\" height=\""
    << kLegendH << "\" fill=\"url(#scale)\"/>\n";
  const int lx[3] = {kLeft, kLeft + kCellW * kLayerCount / 2, kLeft + kCellW * kLayerCount};
  const char* ll[3] = {"-1", "0", "+1"};
  for (int i = 0; i < 3; ++i) {
    s << "<text x=\"" << lx[i] << "\" y=\"" << ly + kLegendH + 14 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << ll[i] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string grid_summary_json(const GridReport& report, const ReportBundle& bundle) {
  const auto& g = report.grid;
  ojson j;
  j["id"] = report.id;
  j["space"] = area_name(g.space);
  j["pair_set"] = g.pair_set;
  j["n"] = g.n;
  j["mode"] = mode_name(bundle.mode);
  j["centering"] = centering_name(bundle.centering);
  j["tail"] = tail_name(bundle.tail);
  j["delta"] = report.delta;
  j["significance"] = bundle.significance;
  j["report_threshold"] = bundle.report_threshold;
  j["cells"] = ojson::array();
  j["notable"] = ojson::array();
  const CorrelationCell* best = nullptr;
  for (const auto& c : g.cells) {
    ojson cell{{"matrix", kind_name(c.kind)}, {"layer", c.layer}, {"rho", json_number(c.rho)}, {"p", json_number(c.p)}};
    j["cells"].push_back(cell);
    if (!report.delta && std::isfinite(c.p) && c.p < bundle.significance && c.rho >= bundle.report_threshold) {
      j["notable"].push_back(cell);
    }
    if (std::isfinite(c.rho) && (best == nullptr || c.rho > best->rho)) best = &c;
  }
  if (best != nullptr) {
    j["max"] = {{"matrix", kind_name(best->kind)}, {"layer", best->layer}, {"rho", best->rho}, {"p", json_number(best->p)}};
  }
  return j.dump(2) + "\n";
}

std::string bundle_summary_json(const ReportBundle& bundle) {
  ojson j;
  j["mode"] = mode_name(bundle.mode);
  j["centering"] = centering_name(bundle.centering);
  j["tail"] = tail_name(bundle.tail);
  j["significance"] = bundle.significance;
  j["report_threshold"] = bundle.report_threshold;
  j["grids"] = ojson::array();
  for (const auto& g : bundle.grids) {
    j["grids"].push_back({{"id", g.id}, {"space", area_name(g.grid.space)}, {"pair_set", g.grid.pair_set},
                          {"n", g.grid.n}, {"delta", g.delta}});
  }
  for (const auto& c : bundle.clusterings) {
    ojson cj;
    cj["space"] = area_name(c.space);
    cj["k"] = c.k;
    cj["inertia"] = c.inertia;
    for (std::size_t i = 0; i < c.members.size(); ++i) cj["clusters"][c.label(i)] = c.members[i];
    j["clusterings"].push_back(cj);
  }
  for (const auto& f : bundle.focus) {
    ojson fj;
    fj["clusters"] = {f.clusters.first, f.clusters.second};
    fj["space"] = area_name(f.space);
    fj["members"] = {{f.clusters.first, f.first_members}, {f.clusters.second, f.second_members}};
    fj["pairs"] = ojson::array();
    for (const auto& p : f.pairs) fj["pairs"].push_back(p.label());
    fj["polarizing"] = ojson::array();
    for (const auto& p : f.polarizing) fj["polarizing"].push_back(p.code);
    fj["distinctive"] = ojson::array();
    for (const auto& t : f.distinctive) fj["distinctive"].push_back(triple_json(t));
    fj["nearly_polarizing_definition"] =
        "distinctive, not polarizing, and the two clusters share exactly one value of the feature";
    j["focus"].push_back(fj);
  }
  for (const auto& d : bundle.deltas) {
    std::vector<std::string> kinds;
    for (auto k : d.window.kinds) kinds.emplace_back(kind_name(k));
    j["delta_summaries"].push_back({{"space", area_name(d.space)},
                                    {"layers", {d.window.first_layer, d.window.last_layer}},
                                    {"matrices", kinds},
                                    {"cells", d.cells},
                                    {"mean_delta_rho", d.mean_delta}});
  }
  for (const auto& t : bundle.tables) {
    j["pair_tables"].push_back({{"id", t.id}, {"pairs", t.table.rows.size()}, {"digests", t.table.digests}});
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> emit_reports(ReportBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    fail(ErrorCode::Io, "cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
  std::vector<std::string> manifest;
  auto put = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    manifest.push_back(name);
  };
  for (const auto& g : bundle.grids) {
    put(g.id + ".csv", grid_to_csv(g.grid));
    put(g.id + ".json", grid_summary_json(g, bundle));
    std::string title = std::string(area_name(g.grid.space)) + " / " + g.grid.pair_set + " / " +
                        std::string(centering_name(bundle.centering));
    if (g.delta) title += " (post - pre)";
    put(g.id + ".svg", grid_to_svg(g.grid, title, bundle.significance));
  }
  for (const auto& t : bundle.tables) put("pairs_" + t.id + ".csv", pair_table_to_csv(t.table));
  put("summary.json", bundle_summary_json(bundle));
  manifest.push_back("manifest.json");
  write_file(dir / "manifest.json", ojson(manifest).dump(2) + "\n");
  bundle.manifest = manifest;
  return manifest;
}

}  // namespace typosim
