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

// Precomputed per-video feature vectors and the aggregation schemes applied
// to them: frame features (first/middle/last frame), per-second audio
// embeddings, and a bag-of-words caption representation.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memorability/csv.hpp"
#include "memorability/error.hpp"

namespace memorability {

enum class Modality { kVisual, kAudioEmbed, kCaptionBow, kMfccStackFlat };

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kVisual: return "visual";
    case Modality::kAudioEmbed: return "audio_embed";
    case Modality::kCaptionBow: return "caption_bow";
    case Modality::kMfccStackFlat: return "mfcc_stack_flat";
  }
  return "?";
}

inline Modality parse_modality(std::string_view s) {
  if (s == "visual") return Modality::kVisual;
  if (s == "audio_embed") return Modality::kAudioEmbed;
  if (s == "caption_bow") return Modality::kCaptionBow;
  if (s == "mfcc_stack_flat") return Modality::kMfccStackFlat;
  throw DataError("unknown modality '" + std::string(s) + "'");
}

/// Id-indexed dense vectors of one shared dimension.
struct FeatureTable {
  std::string dataset_id;
  Modality modality = Modality::kVisual;
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> rows;
  /// Ids whose vector was zero-padded (short audio).
  std::set<std::string> padded;

  const std::vector<double>* find(const std::string& video_id) const {
    auto it = rows.find(video_id);
    return it == rows.end() ? nullptr : &it->second;
  }

  void insert(const std::string& video_id, std::vector<double> values) {
    if (rows.empty() && dim == 0) dim = values.size();
    if (values.size() != dim)
      throw InvalidArgument("feature row for '" + video_id + "' has length " + std::to_string(values.size()) +
                            ", table dimension is " + std::to_string(dim));
    for (double v : values)
      if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value for '" + video_id + "'");
    if (!rows.emplace(video_id, std::move(values)).second)
      throw InvalidArgument("duplicate feature row for '" + video_id + "'");
  }
};

namespace detail {

/// Parses a `video_id,f0,...` file, calling sink(id, values, line) per row.
template <typename Sink>
std::size_t read_feature_csv(const std::string& path, Sink&& sink) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw DataError(path + ": empty feature file");
  const auto header = csv::split_line(lines.front().text);
  if (header.size() < 2 || csv::trim(header[0]) != "video_id")
    throw DataError(at_line(path, lines.front().number) + ": header must be video_id,f0,...,f{d-1}");
  const std::size_t dim = header.size() - 1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, text] = lines[i];
    const auto cells = csv::split_line(text);
    if (cells.size() != header.size())
      throw DataError(at_line(path, number) + ": expected " + std::to_string(dim) + " feature values, got " +
                      std::to_string(cells.size() - 1));
    std::vector<double> values(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const auto v = csv::parse_double(cells[c + 1]);
      if (!v) throw DataError(at_line(path, number) + ": non-numeric feature value '" + cells[c + 1] + "'");
      if (!std::isfinite(*v))
        throw DataError(at_line(path, number) + ": non-finite feature value '" + csv::trim(cells[c + 1]) + "'");
      values[c] = *v;
    }
    sink(csv::trim(cells[0]), std::move(values), number);
  }
  return dim;
}

}  // namespace detail

/// One vector per video; a repeated id is an error.
inline FeatureTable load_feature_table(const std::string& path, Modality modality, const std::string& dataset_id) {
  FeatureTable table;
  table.dataset_id = dataset_id;
  table.modality = modality;
  table.dim = detail::read_feature_csv(path, [&](std::string id, std::vector<double> v, std::size_t line) {
    if (!table.rows.emplace(id, std::move(v)).second)
      throw DataError(at_line(path, line) + ": duplicate video_id '" + id + "'");
  });
  return table;
}

/// Several vectors per video (one per frame or per second), in file order.
inline std::map<std::string, std::vector<std::vector<double>>> load_feature_sequences(const std::string& path) {
  std::map<std::string, std::vector<std::vector<double>>> out;
  detail::read_feature_csv(path, [&](std::string id, std::vector<double> v, std::size_t) {
    out[id].push_back(std::move(v));
  });
  return out;
}

/// Values rendered with 9 significant digits.
inline std::string render_feature_table(const FeatureTable& table) {
  std::string out = "video_id";
  for (std::size_t c = 0; c < table.dim; ++c) out += ",f" + std::to_string(c);
  out += '\n';
  for (const auto& [id, values] : table.rows) {
    out += csv::escape(id);
    for (double v : values) {
      out += ',';
      out += csv::significant(v, 9);
    }
    out += '\n';
  }
  return out;
}

inline void write_feature_table(const FeatureTable& table, const std::string& path) {
  csv::write_file(path, render_feature_table(table));
}

enum class FrameAggregation { kMean, kConcat };

inline FrameAggregation parse_frame_aggregation(std::string_view s) {
  if (s == "mean") return FrameAggregation::kMean;
  if (s == "concat") return FrameAggregation::kConcat;
  throw DataError("unknown aggregation '" + std::string(s) + "' (expected mean or concat)");
}

/// Combines per-frame vectors: elementwise mean (length d) or concatenation
/// in frame order (length d*k).
inline std::vector<double> aggregate_frame_features(std::span<const std::vector<double>> frames,
                                                    FrameAggregation mode) {
  if (frames.empty()) throw InvalidArgument("no frame features to aggregate");
  const std::size_t d = frames.front().size();
  for (const auto& f : frames)
    if (f.size() != d)
      throw InvalidArgument("frame feature lengths differ (" + std::to_string(d) + " vs " +
                            std::to_string(f.size()) + ")");
  std::vector<double> out;
  if (mode == FrameAggregation::kConcat) {
    out.reserve(d * frames.size());
    for (const auto& f : frames) out.insert(out.end(), f.begin(), f.end());
    return out;
  }
  out.assign(d, 0.0);
  for (const auto& f : frames)
    for (std::size_t j = 0; j < d; ++j) out[j] += f[j];
  const double k = static_cast<double>(frames.size());
  for (double& v : out) v /= k;
  return out;
}

struct WindowedEmbedding {
  std::vector<double> values;
  bool padded = false;
};

/// Concatenates the first `n_seconds` one-second embeddings in time order.
/// Missing seconds are zero vectors and set `padded`.
inline WindowedEmbedding concat_second_embeddings(std::span<const std::vector<double>> per_second,
                                                  std::size_t n_seconds) {
  if (per_second.empty()) throw InvalidArgument("no audio embeddings for this video");
  if (n_seconds == 0) throw InvalidArgument("n_seconds must be positive");
  const std::size_t d = per_second.front().size();
  for (const auto& v : per_second)
    if (v.size() != d) throw InvalidArgument("per-second embedding lengths differ");
  WindowedEmbedding out;
  out.values.assign(n_seconds * d, 0.0);
  const std::size_t take = std::min(n_seconds, per_second.size());
  for (std::size_t s = 0; s < take; ++s) std::copy(per_second[s].begin(), per_second[s].end(), out.values.begin() + s * d);
  out.padded = take < n_seconds;
  return out;
}

/// Lowercases, removes ASCII punctuation and splits on whitespace.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      continue;
    } else {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  return tokens;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i)
      if (!index_.emplace(tokens_[i], i).second) throw InvalidArgument("duplicate vocabulary token '" + tokens_[i] + "'");
  }

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  std::optional<std::size_t> index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Most frequent tokens first, ties in lexicographic order, truncated to
/// `max_size`.
inline Vocabulary build_vocabulary(std::span<const std::string> captions, std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& c : captions)
    for (auto& t : tokenize(c)) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < ranked.size() && i < max_size; ++i) tokens.push_back(ranked[i].first);
  return Vocabulary(std::move(tokens));
}

inline void write_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::string out;
  for (const auto& t : vocab.tokens()) out += t + '\n';
  csv::write_file(path, out);
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::vector<std::string> tokens;
  for (auto& line : csv::read_lines(path)) tokens.push_back(csv::trim(line.text));
  return Vocabulary(std::move(tokens));
}

/// Token counts in vocabulary order, L2-normalized. Out-of-vocabulary
/// tokens are ignored; an all-zero count vector is returned unchanged.
inline std::vector<double> bow_caption_features(std::string_view paragraph, const Vocabulary& vocab) {
  if (vocab.empty()) throw InvalidArgument("bag-of-words features need a nonempty vocabulary");
  std::vector<double> counts(vocab.size(), 0.0);
  for (const auto& t : tokenize(paragraph))
    if (auto i = vocab.index_of(t)) counts[*i] += 1.0;
  double ss = 0.0;
  for (double c : counts) ss += c * c;
  if (ss > 0.0) {
    const double norm = std::sqrt(ss);
    for (double& c : counts) c /= norm;
  }
  return counts;
}

}  // namespace memorability
