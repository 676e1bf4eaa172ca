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

// Result tables: one (run, target) row per evaluation, rendered as CSV
// (the report.csv interchange format) or as publication-style wide tables with
// r_s / r column pairs per target.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memorability/csv.hpp"
#include "memorability/dataset.hpp"
#include "memorability/error.hpp"

namespace memorability {

struct ReportRow {
  std::string run;
  Target target = Target::kShortNorm;
  double spearman = 0.0;
  double pearson = 0.0;
  std::size_t n_test = 0;
  std::size_t dropped = 0;
};

struct ReportTable {
  std::vector<ReportRow> rows;
  std::string config_hash;
  std::string timestamp;
};

enum class TableFormat { kPlain, kCsv, kMarkdown };

inline TableFormat parse_table_format(std::string_view s) {
  if (s == "plain") return TableFormat::kPlain;
  if (s == "csv") return TableFormat::kCsv;
  if (s == "markdown") return TableFormat::kMarkdown;
  throw DataError("unknown table format '" + std::string(s) + "' (expected plain, csv or markdown)");
}

inline std::string_view target_label(Target t) {
  switch (t) {
    case Target::kShortRaw: return "Short-raw";
    case Target::kShortNorm: return "Short-norm";
    case Target::kLong: return "Long";
  }
  return "?";
}

/// Three decimals. With drop_leading_zero the leading zero of a negative value is
/// dropped ("-.021").
inline std::string format_correlation(double v, bool drop_leading_zero) {
  std::string s = csv::fixed(v, 3);
  if (drop_leading_zero && s.rfind("-0.", 0) == 0) s.erase(1, 1);
  return s;
}

/// FNV-1a, 64-bit, hex.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace report_detail {

inline std::vector<std::string> run_order(const ReportTable& report) {
  std::vector<std::string> runs;
  for (const auto& r : report.rows)
    if (std::find(runs.begin(), runs.end(), r.run) == runs.end()) runs.push_back(r.run);
  return runs;
}

inline std::vector<Target> target_order(const ReportTable& report) {
  std::vector<Target> targets;
  for (Target t : kAllTargets)
    if (std::any_of(report.rows.begin(), report.rows.end(), [&](const auto& r) { return r.target == t; }))
      targets.push_back(t);
  return targets;
}

inline const ReportRow* find(const ReportTable& report, const std::string& run, Target t) {
  for (const auto& r : report.rows)
    if (r.run == run && r.target == t) return &r;
  return nullptr;
}

}  // namespace report_detail

/// csv: `run,target,spearman,pearson,n_test,dropped`, one line per row.
/// plain / markdown: one line per run, an (r_s, r) column pair per target
/// present anywhere in the report, "-" where a run lacks that target.
inline std::string render_table(const ReportTable& report, TableFormat format) {
  if (report.rows.empty()) throw InvalidArgument("cannot render an empty report");
  std::string out;
  if (format == TableFormat::kCsv) {
    out = "run,target,spearman,pearson,n_test,dropped\n";
    for (const auto& r : report.rows)
      out += csv::escape(r.run) + "," + std::string(to_string(r.target)) + "," + format_correlation(r.spearman, false) +
             "," + format_correlation(r.pearson, false) + "," + std::to_string(r.n_test) + "," +
             std::to_string(r.dropped) + "\n";
    return out;
  }

  const auto runs = report_detail::run_order(report);
  const auto targets = report_detail::target_order(report);
  const bool drop_leading_zero = format == TableFormat::kPlain;
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Run"};
  for (Target t : targets) {
    header.push_back(std::string(target_label(t)) + " r_s");
    header.push_back(std::string(target_label(t)) + " r");
  }
  for (const auto& run : runs) {
    std::vector<std::string> line{run};
    for (Target t : targets) {
      if (const ReportRow* r = report_detail::find(report, run, t)) {
        line.push_back(format_correlation(r->spearman, drop_leading_zero));
        line.push_back(format_correlation(r->pearson, drop_leading_zero));
      } else {
        line.push_back("-");
        line.push_back("-");
      }
    }
    grid.push_back(std::move(line));
  }

  if (format == TableFormat::kMarkdown) {
    auto row = [](const std::vector<std::string>& cells) {
      std::string s = "|";
      for (const auto& c : cells) s += " " + c + " |";
      return s + "\n";
    };
    out += row(header);
    out += "|---|";
    for (std::size_t i = 1; i < header.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto& line : grid) out += row(line);
    return out;
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& line : grid) width[c] = std::max(width[c], line[c].size());
  }
  auto row = [&](const std::vector<std::string>& cells) {
    std::string s = cells[0] + std::string(width[0] - cells[0].size(), ' ');
    for (std::size_t c = 1; c < cells.size(); ++c) s += "  " + std::string(width[c] - cells[c].size(), ' ') + cells[c];
    return s + "\n";
  };
  out += row(header);
  for (const auto& line : grid) out += row(line);
  return out;
}

/// Reads a report.csv back; correlations come back rounded to 3 decimals.
inline ReportTable parse_report_csv(const std::string& text, const std::string& origin = "<report>") {
  ReportTable report;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    const auto cells = csv::split_line(line);
    if (!header_seen) {
      if (line != "run,target,spearman,pearson,n_test,dropped")
        throw DataError(at_line(origin, line_no) + ": expected header run,target,spearman,pearson,n_test,dropped");
      header_seen = true;
      continue;
    }
    if (cells.size() != 6) throw DataError(at_line(origin, line_no) + ": expected 6 fields");
    ReportRow r;
    r.run = cells[0];
    r.target = parse_target(cells[1]);
    const auto rs = csv::parse_double(cells[2]);
    const auto rp = csv::parse_double(cells[3]);
    const auto n = csv::parse_double(cells[4]);
    const auto d = csv::parse_double(cells[5]);
    if (!rs || !rp || !n || !d || *n < 0 || *d < 0) throw DataError(at_line(origin, line_no) + ": malformed values");
    r.spearman = *rs;
    r.pearson = *rp;
    r.n_test = static_cast<std::size_t>(*n);
    r.dropped = static_cast<std::size_t>(*d);
    report.rows.push_back(std::move(r));
  }
  if (!header_seen) throw DataError(origin + ": empty report");
  return report;
}

}  // namespace memorability
