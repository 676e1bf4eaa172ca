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

// Seeded synthetic datasets shaped like the real benchmarks (named
// datasets with train/dev/test splits, per-video features, memorability
// targets in [0,1]), used because the real data cannot be redistributed.
//
// Generation order (fixed, so identical specs give identical bytes):
//   1. weights w_j = weight_scale * N(0,1) / sqrt(dim)
//   2. audio projection P (audio_dim x dim), if audio_dim > 0
//   3. per dataset in spec order, per split (train, dev, test), per video:
//      x_j = shift + e_j with e_j ~ N(0,1) or Exp(1) - 1, eps ~ N(0,1), eps_long ~ N(0,1), then audio
//      and caption draws.
//   z = w.x + noise * eps
//   short_raw  = sigmoid(z)
//   short_norm = sigmoid(z / 2)
//   long       = sigmoid(z / 2 + noise * eps_long)   (only if has_long)
//
// Random numbers come from SplitMix64; normals use Box-Muller, one normal
// per pair of uniforms.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "memorability/config.hpp"
#include "memorability/csv.hpp"
#include "memorability/dataset.hpp"
#include "memorability/feature_store.hpp"

namespace memorability {

/// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

struct SyntheticDatasetSpec {
  std::string dataset_id;
  std::size_t n_train = 0;
  std::size_t n_dev = 0;
  std::size_t n_test = 0;
  /// Mean offset added to every feature of this dataset.
  double shift = 0.0;
  bool has_long = true;
};

/// Marginal of each feature before the per-source offset. Both have mean 0
/// and variance 1; the exponential one is skewed like pooled activations.
enum class FeatureDistribution { kNormal, kExponential };

inline FeatureDistribution parse_feature_distribution(std::string_view s) {
  if (s == "normal") return FeatureDistribution::kNormal;
  if (s == "exponential") return FeatureDistribution::kExponential;
  throw DataError("unknown feature distribution '" + std::string(s) + "' (expected normal or exponential)");
}

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t dim = 16;
  double weight_scale = 1.0;
  double noise = 0.0;
  FeatureDistribution features = FeatureDistribution::kNormal;
  std::vector<SyntheticDatasetSpec> datasets;
  /// Per-second audio embeddings (0 disables audio output).
  std::size_t audio_dim = 0;
  std::size_t audio_seconds = 3;
  /// Fraction of videos without audio, and of videos with short audio.
  double audio_missing_rate = 0.0;
  double audio_short_rate = 0.0;
  bool captions = false;

  void validate() const {
    if (dim == 0) throw DataError("synthetic spec: dim must be positive");
    if (!(noise >= 0.0)) throw DataError("synthetic spec: noise must be nonnegative");
    if (datasets.empty()) throw DataError("synthetic spec: at least one dataset is required");
    for (const auto& d : datasets) {
      if (d.dataset_id.empty()) throw DataError("synthetic spec: empty dataset id");
      if (d.n_train == 0 || d.n_dev == 0 || d.n_test == 0)
        throw DataError("synthetic spec: split sizes of '" + d.dataset_id + "' must be positive");
    }
    if (audio_dim > 0 && audio_seconds == 0) throw DataError("synthetic spec: audio_seconds must be positive");
    for (double r : {audio_missing_rate, audio_short_rate})
      if (!(r >= 0.0 && r <= 1.0)) throw DataError("synthetic spec: rates must lie in [0,1]");
  }
};

struct SyntheticDataset {
  SplitManifest manifest;
  GroundTruthTable ground_truth;
  FeatureTable features;
  /// Per-second audio embeddings; videos without audio have no entry.
  std::map<std::string, std::vector<std::vector<double>>> audio;
  std::map<std::string, std::vector<std::string>> captions;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline std::vector<SyntheticDataset> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  std::vector<double> w(spec.dim);
  for (double& v : w) v = spec.weight_scale * rng.normal() / std::sqrt(static_cast<double>(spec.dim));
  std::vector<std::vector<double>> projection(spec.audio_dim, std::vector<double>(spec.dim));
  for (auto& row : projection)
    for (double& v : row) v = rng.normal() / std::sqrt(static_cast<double>(spec.dim));

  std::vector<SyntheticDataset> out;
  for (const auto& ds : spec.datasets) {
    SyntheticDataset s;
    s.manifest.dataset_id = ds.dataset_id;
    s.ground_truth.dataset_id = ds.dataset_id;
    s.features.dataset_id = ds.dataset_id;
    s.features.modality = Modality::kVisual;
    s.features.dim = spec.dim;
    std::size_t counter = 0;
    for (Split split : kAllSplits) {
      const std::size_t n = split == Split::kTrain ? ds.n_train : split == Split::kDev ? ds.n_dev : ds.n_test;
      s.manifest.expected_counts[split] = n;
      auto& members = s.manifest.member_ids[split];
      for (std::size_t i = 0; i < n; ++i) {
        char id[64];
        std::snprintf(id, sizeof id, "%s_%05zu", ds.dataset_id.c_str(), ++counter);
        std::vector<double> x(spec.dim);
        for (double& v : x)
          v = ds.shift + (spec.features == FeatureDistribution::kNormal ? rng.normal() : -std::log(1.0 - rng.uniform()) - 1.0);
        const double eps = rng.normal();
        const double eps_long = rng.normal();
        double z = spec.noise * eps;
        for (std::size_t j = 0; j < spec.dim; ++j) z += w[j] * x[j];
        TargetScores scores;
        scores.short_raw = sigmoid(z);
        scores.short_norm = sigmoid(z / 2.0);
        if (ds.has_long) scores.long_term = sigmoid(z / 2.0 + spec.noise * eps_long);

        if (spec.audio_dim > 0) {
          const bool missing = rng.uniform() < spec.audio_missing_rate;
          const bool short_audio = rng.uniform() < spec.audio_short_rate;
          if (!missing) {
            const std::size_t seconds = short_audio && spec.audio_seconds > 1 ? spec.audio_seconds - 1 : spec.audio_seconds;
            auto& seq = s.audio[id];
            for (std::size_t sec = 0; sec < seconds; ++sec) {
              std::vector<double> e(spec.audio_dim);
              for (std::size_t a = 0; a < spec.audio_dim; ++a) {
                double v = 0.1 * rng.normal();
                for (std::size_t j = 0; j < spec.dim; ++j) v += projection[a][j] * x[j];
                e[a] = v;
              }
              seq.push_back(std::move(e));
            }
          }
        }
        if (spec.captions) {
          // Two captions naming the strongly active features, in index order.
          for (int c = 0; c < 2; ++c) {
            std::string caption = c == 0 ? "A video showing" : "Scene with";
            for (std::size_t j = 0; j < spec.dim; ++j)
              if (x[j] - ds.shift + 0.3 * rng.normal() > 0.5) caption += " item" + std::to_string(j);
            s.captions[id].push_back(caption + ".");
          }
        }
        members.insert(id);
        s.ground_truth.rows.emplace(id, scores);
        s.features.rows.emplace(id, std::move(x));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Parses a synthetic spec:
///
///   seed = 7
///   dim = 16
///   weight_scale = 1.0
///   noise = 0.0
///   features = "normal"        # normal | exponential
///   [[datasets]]
///   id = "trecvid"
///   train = 588
///   dev = 1116
///   test = 500
///   shift = 0.0
///   has_long = true
///
/// plus optional audio_dim, audio_seconds, audio_missing_rate,
/// audio_short_rate and captions at top level.
inline SyntheticSpec parse_synthetic_spec(const config::Table& root) {
  SyntheticSpec spec;
  auto nonneg = [](std::int64_t v, const char* what) {
    if (v < 0) throw DataError(std::string("synthetic spec: ") + what + " must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  spec.seed = static_cast<std::uint64_t>(root.get_int("seed", 0));
  spec.dim = nonneg(root.get_int("dim", 16), "dim");
  spec.weight_scale = root.get_double("weight_scale", 1.0);
  spec.noise = root.get_double("noise", 0.0);
  spec.features = parse_feature_distribution(root.get_string("features", "normal"));
  spec.audio_dim = nonneg(root.get_int("audio_dim", 0), "audio_dim");
  spec.audio_seconds = nonneg(root.get_int("audio_seconds", 3), "audio_seconds");
  spec.audio_missing_rate = root.get_double("audio_missing_rate", 0.0);
  spec.audio_short_rate = root.get_double("audio_short_rate", 0.0);
  spec.captions = root.get_bool("captions", false);
  for (const auto& t : root.get_table_array("datasets")) {
    SyntheticDatasetSpec d;
    d.dataset_id = t->get_string("id");
    d.n_train = nonneg(t->get_int("train"), "train");
    d.n_dev = nonneg(t->get_int("dev"), "dev");
    d.n_test = nonneg(t->get_int("test"), "test");
    d.shift = t->get_double("shift", 0.0);
    d.has_long = t->get_bool("has_long", true);
    spec.datasets.push_back(std::move(d));
  }
  spec.validate();
  return spec;
}

inline SyntheticSpec load_synthetic_spec(const std::string& path) {
  return parse_synthetic_spec(config::parse_file(path));
}

/// Writes each dataset to `<out_dir>/<dataset_id>/`: manifest.toml,
/// {train,dev,test}_ids.txt, ground_truth.csv, features.csv, and when
/// present audio.csv (one row per second) and captions.csv.
inline void write_synthetic(const std::vector<SyntheticDataset>& datasets, const std::string& out_dir) {
  namespace fs = std::filesystem;
  for (const auto& s : datasets) {
    const fs::path dir = fs::path(out_dir) / s.manifest.dataset_id;
    fs::create_directories(dir);
    std::string manifest = "dataset_id = \"" + s.manifest.dataset_id + "\"\n";
    for (Split split : kAllSplits) {
      const std::string name(to_string(split));
      std::string ids;
      for (const auto& id : s.manifest.member_ids.at(split)) ids += id + "\n";
      csv::write_file((dir / (name + "_ids.txt")).string(), ids);
      manifest += "\n[splits." + name + "]\nids = \"" + name + "_ids.txt\"\nexpected = " +
                  std::to_string(s.manifest.expected_counts.at(split)) + "\n";
    }
    csv::write_file((dir / "manifest.toml").string(), manifest);
    write_ground_truth(s.ground_truth, (dir / "ground_truth.csv").string());
    write_feature_table(s.features, (dir / "features.csv").string());
    if (!s.audio.empty()) {
      const std::size_t d = s.audio.begin()->second.front().size();
      std::string out = "video_id";
      for (std::size_t c = 0; c < d; ++c) out += ",f" + std::to_string(c);
      out += '\n';
      for (const auto& [id, seq] : s.audio)
        for (const auto& e : seq) {
          out += id;
          for (double v : e) out += "," + csv::significant(v, 9);
          out += '\n';
        }
      csv::write_file((dir / "audio.csv").string(), out);
    }
    if (!s.captions.empty()) {
      std::string out = "video_id,caption\n";
      for (const auto& [id, caps] : s.captions)
        for (const auto& c : caps) out += id + "," + csv::escape(c) + "\n";
      csv::write_file((dir / "captions.csv").string(), out);
    }
  }
}

}  // namespace memorability
