/*
 * Copyright 2026 The memorability authors.
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

// Video metadata, ground-truth memorability scores, captions and split
// manifests for named datasets. Everything here is immutable once loaded.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memorability/config.hpp"
#include "memorability/csv.hpp"
#include "memorability/error.hpp"

namespace memorability {

enum class Split { kTrain, kDev, kTest };

inline constexpr std::array<Split, 3> kAllSplits{Split::kTrain, Split::kDev, Split::kTest};

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(s) + "' (expected train, dev or test)");
}

/// The three memorability targets. Short-term scores come in a raw and a
/// normalised variant; long-term scores are collected 24-72 hours later.
enum class Target { kShortRaw, kShortNorm, kLong };

inline constexpr std::array<Target, 3> kAllTargets{Target::kShortRaw, Target::kShortNorm, Target::kLong};

inline std::string_view to_string(Target t) {
  switch (t) {
    case Target::kShortRaw: return "short_raw";
    case Target::kShortNorm: return "short_norm";
    case Target::kLong: return "long";
  }
  return "?";
}

inline Target parse_target(std::string_view s) {
  if (s == "short_raw") return Target::kShortRaw;
  if (s == "short_norm") return Target::kShortNorm;
  if (s == "long") return Target::kLong;
  throw DataError("unknown target '" + std::string(s) + "' (expected short_raw, short_norm or long)");
}

struct VideoRecord {
  std::string video_id;
  std::string dataset_id;
  Split split = Split::kTrain;
  std::vector<std::string> captions;
  bool has_audio = true;
};

/// Per-video target scores; an absent cell stays absent, never zero.
struct TargetScores {
  std::optional<double> short_raw;
  std::optional<double> short_norm;
  std::optional<double> long_term;

  const std::optional<double>& get(Target t) const {
    switch (t) {
      case Target::kShortRaw: return short_raw;
      case Target::kShortNorm: return short_norm;
      case Target::kLong: return long_term;
    }
    return short_raw;
  }
  std::optional<double>& get(Target t) { return const_cast<std::optional<double>&>(std::as_const(*this).get(t)); }

  bool operator==(const TargetScores&) const = default;
};

struct GroundTruthTable {
  std::string dataset_id;
  std::map<std::string, TargetScores> rows;

  const TargetScores* find(const std::string& video_id) const {
    auto it = rows.find(video_id);
    return it == rows.end() ? nullptr : &it->second;
  }

  bool operator==(const GroundTruthTable&) const = default;
};

/// Parses `video_id,short_raw,short_norm,long`. Score columns may be any
/// nonempty subset, in any order; empty cells are absent targets.
inline GroundTruthTable load_ground_truth(const std::string& path, const std::string& dataset_id) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw DataError(path + ": empty ground-truth file");
  const auto header = csv::split_line(lines.front().text);
  std::optional<std::size_t> id_col;
  std::vector<std::pair<std::size_t, Target>> score_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = csv::trim(header[c]);
    if (name == "video_id") {
      id_col = c;
    } else {
      try {
        score_cols.emplace_back(c, parse_target(name));
      } catch (const DataError&) {
        throw DataError(at_line(path, lines.front().number) + ": unknown ground-truth column '" + name + "'");
      }
    }
  }
  if (!id_col || score_cols.empty())
    throw DataError(at_line(path, lines.front().number) +
                    ": header must name video_id and at least one of short_raw, short_norm, long");

  GroundTruthTable table;
  table.dataset_id = dataset_id;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    const auto cells = csv::split_line(text);
    if (cells.size() != header.size())
      throw DataError(at_line(path, number) + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    const std::string id = csv::trim(cells[*id_col]);
    if (id.empty()) throw DataError(at_line(path, number) + ": empty video_id");
    TargetScores scores;
    bool any = false;
    for (const auto& [col, target] : score_cols) {
      const std::string cell = csv::trim(cells[col]);
      if (cell.empty()) continue;
      const auto v = csv::parse_double(cell);
      if (!v || !std::isfinite(*v))
        throw DataError(at_line(path, number) + ": non-numeric score '" + cell + "' for " +
                        std::string(to_string(target)));
      if (*v < 0.0 || *v > 1.0)
        throw DataError(at_line(path, number) + ": score " + cell + " for " + std::string(to_string(target)) +
                        " outside [0,1]");
      scores.get(target) = *v;
      any = true;
    }
    if (!any) throw DataError(at_line(path, number) + ": video '" + id + "' has no target scores");
    if (!table.rows.emplace(id, scores).second)
      throw DataError(at_line(path, number) + ": duplicate video_id '" + id + "'");
  }
  return table;
}

/// Canonical CSV rendering: all three score columns, six fractional digits.
inline std::string render_ground_truth(const GroundTruthTable& table) {
  std::string out = "video_id,short_raw,short_norm,long\n";
  for (const auto& [id, s] : table.rows) {
    out += csv::escape(id);
    for (Target t : kAllTargets) {
      out += ',';
      if (const auto& v = s.get(t)) out += csv::fixed(*v, 6);
    }
    out += '\n';
  }
  return out;
}

inline void write_ground_truth(const GroundTruthTable& table, const std::string& path) {
  csv::write_file(path, render_ground_truth(table));
}

struct SplitManifest {
  std::string dataset_id;
  std::map<Split, std::size_t> expected_counts;
  std::map<Split, std::set<std::string>> member_ids;

  /// First split (train, dev, test order) containing `video_id`.
  std::optional<Split> split_of(const std::string& video_id) const {
    for (Split s : kAllSplits) {
      auto it = member_ids.find(s);
      if (it != member_ids.end() && it->second.count(video_id)) return s;
    }
    return std::nullopt;
  }
};

inline std::vector<std::string> read_id_list(const std::string& path) {
  std::vector<std::string> ids;
  for (const auto& line : csv::read_lines(path)) {
    std::string id = csv::trim(line.text);
    if (!id.empty() && id.front() != '#') ids.push_back(std::move(id));
  }
  return ids;
}

/// Reads a manifest of the form
///
///   dataset_id = "trecvid"
///   [splits.train]
///   ids = "train_ids.txt"     # one id per line, relative to the manifest
///   expected = 588
///
/// with optional [splits.dev] and [splits.test] blocks.
inline SplitManifest load_manifest(const std::string& path) {
  const config::Table root = config::parse_file(path);
  SplitManifest m;
  m.dataset_id = root.get_string("dataset_id");
  const config::Table& splits = root.get_table("splits");
  for (const auto& [name, value] : splits.entries) {
    const Split s = parse_split(name);
    if (value.kind != config::Value::Kind::kTable) throw DataError(path + ": [splits." + name + "] must be a table");
    const config::Table& t = *value.table;
    auto& members = m.member_ids[s];
    if (t.has("ids")) {
      for (auto& id : read_id_list(config::resolve_relative(path, t.get_string("ids")))) members.insert(id);
    }
    if (t.has("expected")) {
      const auto n = t.get_int("expected");
      if (n < 0) throw DataError(path + ": splits." + name + ".expected must be nonnegative");
      m.expected_counts[s] = static_cast<std::size_t>(n);
    }
  }
  return m;
}

struct ValidationFinding {
  enum class Kind { kDatasetMismatch, kCountMismatch, kMissingGroundTruth, kOverlap };
  Kind kind;
  std::string message;

  bool operator==(const ValidationFinding&) const = default;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;

  bool ok() const { return findings.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

/// Checks declared split sizes, ground-truth coverage and pairwise
/// disjointness. Never throws; every problem becomes a finding.
inline ValidationReport validate_splits(const SplitManifest& manifest, const GroundTruthTable& gt) {
  using Kind = ValidationFinding::Kind;
  ValidationReport report;
  if (manifest.dataset_id != gt.dataset_id)
    report.findings.push_back({Kind::kDatasetMismatch, "manifest dataset '" + manifest.dataset_id +
                                                           "' does not match ground truth dataset '" +
                                                           gt.dataset_id + "'"});
  static const std::set<std::string> kEmpty;
  auto members = [&](Split s) -> const std::set<std::string>& {
    auto it = manifest.member_ids.find(s);
    return it == manifest.member_ids.end() ? kEmpty : it->second;
  };
  for (Split s : kAllSplits) {
    auto it = manifest.expected_counts.find(s);
    if (it != manifest.expected_counts.end() && it->second != members(s).size())
      report.findings.push_back({Kind::kCountMismatch, std::string(to_string(s)) + ": expected " +
                                                           std::to_string(it->second) + " videos, found " +
                                                           std::to_string(members(s).size())});
  }
  for (Split s : kAllSplits)
    for (const auto& id : members(s))
      if (!gt.find(id))
        report.findings.push_back(
            {Kind::kMissingGroundTruth, std::string(to_string(s)) + ": '" + id + "' has no ground truth"});
  for (std::size_t a = 0; a < kAllSplits.size(); ++a)
    for (std::size_t b = a + 1; b < kAllSplits.size(); ++b)
      for (const auto& id : members(kAllSplits[a]))
        if (members(kAllSplits[b]).count(id))
          report.findings.push_back({Kind::kOverlap, "'" + id + "' is in both " +
                                                         std::string(to_string(kAllSplits[a])) + " and " +
                                                         std::string(to_string(kAllSplits[b]))});
  return report;
}

enum class NormalizeMode { kRaw, kMinMax, kZScore };

inline NormalizeMode parse_normalize_mode(std::string_view s) {
  if (s == "raw") return NormalizeMode::kRaw;
  if (s == "minmax") return NormalizeMode::kMinMax;
  if (s == "zscore") return NormalizeMode::kZScore;
  throw DataError("unknown normalization '" + std::string(s) + "'");
}

/// raw: identity. minmax: affine onto [0,1]. zscore: mean 0, sample
/// standard deviation 1.
inline std::vector<double> normalize_scores(std::span<const double> values, NormalizeMode mode) {
  if (values.empty()) throw InvalidArgument("cannot normalize an empty score vector");
  std::vector<double> out(values.begin(), values.end());
  switch (mode) {
    case NormalizeMode::kRaw:
      break;
    case NormalizeMode::kMinMax: {
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const double min = *lo, max = *hi;
      if (!(max > min)) throw InvalidArgument("min-max normalization of a constant vector");
      for (double& v : out) v = (v - min) / (max - min);
      // pin the extremes so rounding cannot push them off 0 and 1
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (values[i] == min) out[i] = 0.0;
        if (values[i] == max) out[i] = 1.0;
      }
      break;
    }
    case NormalizeMode::kZScore: {
      if (values.size() < 2) throw InvalidArgument("z-score normalization needs at least two values");
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
      if (!(sd > 0.0)) throw InvalidArgument("z-score normalization of a constant vector");
      for (double& v : out) v = (v - mean) / sd;
      break;
    }
  }
  return out;
}

inline std::string assemble_caption_paragraph(const VideoRecord& record) {
  std::string out;
  for (const auto& c : record.captions) {
    if (!out.empty()) out.push_back(' ');
    out += c;
  }
  return out;
}

/// `video_id,caption` rows; an id may repeat, captions keep file order.
inline std::map<std::string, std::vector<std::string>> load_captions(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw DataError(path + ": empty captions file");
  const auto header = csv::split_line(lines.front().text);
  if (header.size() != 2 || csv::trim(header[0]) != "video_id" || csv::trim(header[1]) != "caption")
    throw DataError(at_line(path, lines.front().number) + ": captions header must be 'video_id,caption'");
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = csv::split_line(lines[i].text);
    if (cells.size() != 2)
      throw DataError(at_line(path, lines[i].number) + ": expected 2 fields, got " + std::to_string(cells.size()));
    out[csv::trim(cells[0])].push_back(csv::trim(cells[1]));
  }
  return out;
}

/// A loaded dataset: manifest, ground truth and one record per manifest member.
struct Dataset {
  SplitManifest manifest;
  GroundTruthTable ground_truth;
  std::map<std::string, VideoRecord> videos;

  const std::string& id() const { return manifest.dataset_id; }

  std::vector<const VideoRecord*> in_splits(const std::vector<Split>& splits) const {
    std::vector<const VideoRecord*> out;
    for (const auto& [id, rec] : videos)
      if (std::find(splits.begin(), splits.end(), rec.split) != splits.end()) out.push_back(&rec);
    return out;
  }
};

/// Joins a manifest, ground truth and captions into per-video records.
inline Dataset make_dataset(SplitManifest manifest, GroundTruthTable ground_truth,
                            const std::map<std::string, std::vector<std::string>>& captions = {}) {
  Dataset ds;
  ds.manifest = std::move(manifest);
  ds.ground_truth = std::move(ground_truth);
  for (Split s : kAllSplits) {
    auto it = ds.manifest.member_ids.find(s);
    if (it == ds.manifest.member_ids.end()) continue;
    for (const auto& id : it->second) {
      if (ds.videos.count(id)) continue;  // overlaps are reported by validate_splits
      VideoRecord rec{id, ds.manifest.dataset_id, s, {}, true};
      if (auto c = captions.find(id); c != captions.end()) rec.captions = c->second;
      ds.videos.emplace(id, std::move(rec));
    }
  }
  return ds;
}

inline Dataset load_dataset(const std::string& manifest_path, const std::string& ground_truth_path,
                            const std::optional<std::string>& captions_path = std::nullopt) {
  SplitManifest manifest = load_manifest(manifest_path);
  GroundTruthTable gt = load_ground_truth(ground_truth_path, manifest.dataset_id);
  std::map<std::string, std::vector<std::string>> captions;
  if (captions_path) captions = load_captions(*captions_path);
  return make_dataset(std::move(manifest), std::move(gt), captions);
}

}  // namespace memorability
