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

// End-to-end runs: fit a Bayesian ridge model per (feature set, target) on
// the training source and score it on the test split of the test source.
//
//   subtask1  within-dataset prediction
//   subtask2  generalisation: training and testing data must come from
//             different sources

#include <Eigen/Dense>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "memorability/bayesian_ridge.hpp"
#include "memorability/config.hpp"
#include "memorability/dataset.hpp"
#include "memorability/feature_store.hpp"
#include "memorability/rank_metrics.hpp"
#include "memorability/report.hpp"

namespace memorability {

enum class Protocol { kSubtask1, kSubtask2 };

inline Protocol parse_protocol(std::string_view s) {
  if (s == "subtask1") return Protocol::kSubtask1;
  if (s == "subtask2") return Protocol::kSubtask2;
  throw DataError("unknown protocol '" + std::string(s) + "' (expected subtask1 or subtask2)");
}

/// How a feature file is organised: one row per video, several rows per
/// video (frames, aggregated by mean or concat) or one row per second of
/// audio (concatenated over the first n seconds).
enum class FeatureLayout { kPerVideo, kPerFrame, kPerSecond };

inline FeatureLayout parse_feature_layout(std::string_view s) {
  if (s == "per_video") return FeatureLayout::kPerVideo;
  if (s == "per_frame") return FeatureLayout::kPerFrame;
  if (s == "per_second") return FeatureLayout::kPerSecond;
  throw DataError("unknown feature layout '" + std::string(s) + "'");
}

inline bool is_audio(Modality m) { return m == Modality::kAudioEmbed || m == Modality::kMfccStackFlat; }

struct ExperimentConfig {
  std::string run_name;
  Protocol protocol = Protocol::kSubtask1;
  std::string train_dataset;
  std::vector<Split> train_splits{Split::kTrain, Split::kDev};
  std::string test_dataset;
  Modality modality = Modality::kVisual;
  FrameAggregation aggregation = FrameAggregation::kMean;
  std::size_t n_seconds = 3;
  std::size_t vocab_size = 5000;
  std::vector<Target> targets{Target::kShortNorm};
  std::int64_t seed = 0;
  BRRConfig brr;

  void validate() const {
    if (run_name.empty()) throw DataError("run name must not be empty");
    if (protocol == Protocol::kSubtask2 && train_dataset == test_dataset)
      throw DataError("run '" + run_name + "': subtask2 requires training and testing data from different sources (both are '" +
                      train_dataset + "')");
    if (train_splits.empty()) throw DataError("run '" + run_name + "': no training splits");
    for (Split s : train_splits)
      if (s == Split::kTest) throw DataError("run '" + run_name + "': the test split cannot be used for training");
    if (targets.empty()) throw DataError("run '" + run_name + "': no targets");
    if (n_seconds == 0) throw DataError("run '" + run_name + "': n_seconds must be positive");
    if (vocab_size == 0) throw DataError("run '" + run_name + "': vocab_size must be positive");
  }
};

/// Raw feature data for one (dataset, modality).
struct FeatureData {
  FeatureLayout layout = FeatureLayout::kPerVideo;
  FeatureTable table;  // per_video
  std::map<std::string, std::vector<std::vector<double>>> sequences;  // per_frame / per_second
};

/// Loaded datasets and features shared (read-only) by every run.
class ExperimentStores {
 public:
  void add_dataset(Dataset ds) {
    const std::string id = ds.id();
    if (!datasets_.emplace(id, std::move(ds)).second) throw DataError("dataset '" + id + "' registered twice");
  }

  void add_features(const std::string& dataset_id, Modality modality, FeatureData data) {
    if (!features_.emplace(std::make_pair(dataset_id, modality), std::move(data)).second)
      throw DataError("features for '" + dataset_id + "' / " + std::string(to_string(modality)) + " registered twice");
  }

  /// Loads a feature file from disk in the given layout.
  void load_features(const std::string& dataset_id, Modality modality, FeatureLayout layout, const std::string& path) {
    FeatureData data;
    data.layout = layout;
    if (layout == FeatureLayout::kPerVideo) data.table = load_feature_table(path, modality, dataset_id);
    else data.sequences = load_feature_sequences(path);
    add_features(dataset_id, modality, std::move(data));
  }

  const Dataset& dataset(const std::string& id) const {
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw DataError("unknown dataset '" + id + "'");
    return it->second;
  }

  const FeatureData* features(const std::string& dataset_id, Modality modality) const {
    auto it = features_.find({dataset_id, modality});
    return it == features_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, Dataset> datasets_;
  std::map<std::pair<std::string, Modality>, FeatureData> features_;
};

struct RunResult {
  std::vector<ReportRow> rows;
  /// Audio-less videos left out of training, per target (config order).
  std::vector<std::size_t> train_dropped;
  std::vector<std::size_t> n_train;
  /// Splits of every row that entered a fit.
  std::set<Split> train_splits_seen;
};

namespace experiment_detail {

/// Builds the per-video feature vectors of `dataset_id` for a run.
inline FeatureTable materialize(const ExperimentConfig& cfg, const ExperimentStores& stores,
                                const std::string& dataset_id, const Vocabulary* vocab) {
  const Dataset& ds = stores.dataset(dataset_id);
  FeatureTable out;
  out.dataset_id = dataset_id;
  out.modality = cfg.modality;

  if (cfg.modality == Modality::kCaptionBow) {
    if (const FeatureData* pre = stores.features(dataset_id, cfg.modality)) {
      if (pre->layout != FeatureLayout::kPerVideo) throw DataError("caption features must be per_video");
      return pre->table;
    }
    if (!vocab) throw DataError("caption features need a vocabulary");
    for (const auto& [id, rec] : ds.videos) out.insert(id, bow_caption_features(assemble_caption_paragraph(rec), *vocab));
    out.dim = vocab->size();
    return out;
  }

  const FeatureData* data = stores.features(dataset_id, cfg.modality);
  if (!data)
    throw DataError("no " + std::string(to_string(cfg.modality)) + " features registered for dataset '" + dataset_id + "'");
  switch (data->layout) {
    case FeatureLayout::kPerVideo:
      return data->table;
    case FeatureLayout::kPerFrame:
      for (const auto& [id, frames] : data->sequences) out.insert(id, aggregate_frame_features(frames, cfg.aggregation));
      return out;
    case FeatureLayout::kPerSecond:
      for (const auto& [id, seconds] : data->sequences) {
        auto e = concat_second_embeddings(seconds, cfg.n_seconds);
        if (e.padded) out.padded.insert(id);
        out.insert(id, std::move(e.values));
      }
      return out;
  }
  return out;
}

struct Rows {
  std::vector<const VideoRecord*> videos;
  std::size_t dropped = 0;
};

/// Videos in `splits` with a score for `target`. Under an audio modality,
/// videos without audio features are dropped and counted; otherwise a
/// missing feature row is an error.
inline Rows select(const Dataset& ds, const std::vector<Split>& splits, Target target, const FeatureTable& features,
                   bool audio) {
  Rows rows;
  for (const VideoRecord* rec : ds.in_splits(splits)) {
    const TargetScores* scores = ds.ground_truth.find(rec->video_id);
    if (!scores || !scores->get(target)) continue;
    if (!features.find(rec->video_id) || (audio && !rec->has_audio)) {
      if (audio) {
        ++rows.dropped;
        continue;
      }
      throw DataError("dataset '" + ds.id() + "': video '" + rec->video_id + "' has no " +
                      std::string(to_string(features.modality)) + " features");
    }
    rows.videos.push_back(rec);
  }
  return rows;
}

inline Eigen::MatrixXd design(const std::vector<const VideoRecord*>& videos, const FeatureTable& features) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(videos.size()), static_cast<Eigen::Index>(features.dim));
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto& v = *features.find(videos[i]->video_id);
    for (std::size_t j = 0; j < v.size(); ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  return X;
}

inline Eigen::VectorXd targets(const Dataset& ds, const std::vector<const VideoRecord*>& videos, Target t) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(videos.size()));
  for (std::size_t i = 0; i < videos.size(); ++i) y(static_cast<Eigen::Index>(i)) = *ds.ground_truth.find(videos[i]->video_id)->get(t);
  return y;
}

}  // namespace experiment_detail

/// Runs one configuration. Rows come back in the config's target order.
inline RunResult run_experiment(const ExperimentConfig& cfg, const ExperimentStores& stores) {
  cfg.validate();
  const Dataset& train_ds = stores.dataset(cfg.train_dataset);
  const Dataset& test_ds = stores.dataset(cfg.test_dataset);
  const bool audio = is_audio(cfg.modality);

  std::optional<Vocabulary> vocab;
  if (cfg.modality == Modality::kCaptionBow && !stores.features(cfg.train_dataset, cfg.modality)) {
    std::vector<std::string> paragraphs;
    for (const VideoRecord* rec : train_ds.in_splits(cfg.train_splits)) paragraphs.push_back(assemble_caption_paragraph(*rec));
    vocab = build_vocabulary(paragraphs, cfg.vocab_size);
    if (vocab->empty()) throw DataError("run '" + cfg.run_name + "': training captions yield an empty vocabulary");
  }
  const Vocabulary* vp = vocab ? &*vocab : nullptr;
  const FeatureTable train_features = experiment_detail::materialize(cfg, stores, cfg.train_dataset, vp);
  const FeatureTable test_features = cfg.test_dataset == cfg.train_dataset
                                         ? train_features
                                         : experiment_detail::materialize(cfg, stores, cfg.test_dataset, vp);
  if (train_features.dim != test_features.dim)
    throw DataError("run '" + cfg.run_name + "': train features have dimension " + std::to_string(train_features.dim) +
                    " but test features have " + std::to_string(test_features.dim));

  RunResult result;
  for (Target target : cfg.targets) {
    const auto train = experiment_detail::select(train_ds, cfg.train_splits, target, train_features, audio);
    const auto test = experiment_detail::select(test_ds, {Split::kTest}, target, test_features, audio);
    const std::string what = "run '" + cfg.run_name + "', target " + std::string(to_string(target));
    if (train.videos.size() < 2)
      throw DataError(what + ": fewer than two training videos have both features and labels");
    if (test.videos.size() < 2)
      throw DataError(what + ": fewer than two test videos have both features and labels");
    for (const VideoRecord* rec : train.videos) {
      if (rec->split == Split::kTest && rec->dataset_id == test_ds.id())
        throw std::logic_error(what + ": test video '" + rec->video_id + "' reached the training set");
      result.train_splits_seen.insert(rec->split);
    }

    const BRRModel model = fit(experiment_detail::design(train.videos, train_features),
                               experiment_detail::targets(train_ds, train.videos, target), cfg.brr);
    const auto predictions = predict_batch(model, experiment_detail::design(test.videos, test_features));
    std::vector<double> predicted, actual;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      predicted.push_back(predictions[i].mean);
      actual.push_back(*test_ds.ground_truth.find(test.videos[i]->video_id)->get(target));
    }
    ReportRow row;
    row.run = cfg.run_name;
    row.target = target;
    try {
      row.spearman = spearman(predicted, actual);
      row.pearson = pearson(predicted, actual);
    } catch (const InvalidArgument& e) {
      throw DataError(what + ": " + e.what());
    }
    row.n_test = test.videos.size();
    row.dropped = test.dropped;
    result.rows.push_back(std::move(row));
    result.train_dropped.push_back(train.dropped);
    result.n_train.push_back(train.videos.size());
  }
  return result;
}

/// Runs every configuration, concurrently when `parallel`; the report keeps
/// config order.
inline ReportTable run_experiments(const std::vector<ExperimentConfig>& configs, const ExperimentStores& stores,
                                   bool parallel = true) {
  for (const auto& c : configs) c.validate();
  std::vector<RunResult> results(configs.size());
  if (parallel && configs.size() > 1) {
    std::vector<std::future<RunResult>> pending;
    for (const auto& c : configs) pending.push_back(std::async(std::launch::async, [&stores, &c] { return run_experiment(c, stores); }));
    for (std::size_t i = 0; i < pending.size(); ++i) results[i] = pending[i].get();
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) results[i] = run_experiment(configs[i], stores);
  }
  ReportTable report;
  for (auto& r : results)
    for (auto& row : r.rows) report.rows.push_back(std::move(row));
  return report;
}

/// A parsed experiment file: data sources, runs and output location.
struct ExperimentPlan {
  ExperimentStores stores;
  std::vector<ExperimentConfig> runs;
  std::string output_path;
  std::string config_hash;
};

/// Experiment file schema (paths are relative to the file):
///
///   output = "report.csv"
///
///   [datasets.trecvid]
///   manifest = "trecvid/manifest.toml"
///   ground_truth = "trecvid/ground_truth.csv"
///   captions = "trecvid/captions.csv"        # optional
///
///   [[features]]
///   dataset = "trecvid"
///   modality = "visual"                      # visual | audio_embed | caption_bow | mfcc_stack_flat
///   layout = "per_video"                     # per_video | per_frame | per_second
///   path = "trecvid/features.csv"
///
///   [[runs]]
///   name = "BayesianRidge Dense121"
///   protocol = "subtask1"                    # subtask1 | subtask2
///   train = "trecvid"
///   splits_used = ["train", "dev"]           # default
///   test = "trecvid"
///   modality = "visual"
///   aggregation = "mean"                     # mean | concat (per_frame features)
///   n_seconds = 3                            # per_second features
///   vocab_size = 5000                        # caption_bow
///   targets = ["short_raw", "short_norm", "long"]
///   seed = 0
///   standardize = true
///   max_iter = 300
///   tol = 1e-3
inline ExperimentPlan load_experiment(const std::string& path) {
  const std::string text = csv::read_file(path);
  const config::Table root = config::parse(text, path);
  ExperimentPlan plan;
  plan.config_hash = fnv1a_hex(text);
  plan.output_path = config::resolve_relative(path, root.get_string("output", "report.csv"));
  auto rel = [&](const std::string& p) { return config::resolve_relative(path, p); };

  const config::Table& datasets = root.get_table("datasets");
  for (const auto& [name, value] : datasets.entries) {
    if (value.kind != config::Value::Kind::kTable) throw DataError(path + ": [datasets." + name + "] must be a table");
    const config::Table& t = *value.table;
    std::optional<std::string> captions;
    if (t.has("captions")) captions = rel(t.get_string("captions"));
    Dataset ds = load_dataset(rel(t.get_string("manifest")), rel(t.get_string("ground_truth")), captions);
    if (ds.id() != name)
      throw DataError(path + ": [datasets." + name + "] manifest declares dataset_id '" + ds.id() + "'");
    plan.stores.add_dataset(std::move(ds));
  }
  for (const auto& f : root.get_table_array("features")) {
    const std::string dataset = f->get_string("dataset");
    plan.stores.dataset(dataset);
    plan.stores.load_features(dataset, parse_modality(f->get_string("modality")),
                              parse_feature_layout(f->get_string("layout", "per_video")), rel(f->get_string("path")));
  }
  for (const auto& r : root.get_table_array("runs")) {
    ExperimentConfig c;
    c.run_name = r->get_string("name");
    c.protocol = parse_protocol(r->get_string("protocol", "subtask1"));
    c.train_dataset = r->get_string("train");
    c.test_dataset = r->get_string("test");
    if (r->has("splits_used")) {
      c.train_splits.clear();
      for (const auto& s : r->get_strings("splits_used")) c.train_splits.push_back(parse_split(s));
    }
    c.modality = parse_modality(r->get_string("modality", "visual"));
    c.aggregation = parse_frame_aggregation(r->get_string("aggregation", "mean"));
    const auto n_seconds = r->get_int("n_seconds", 3);
    const auto vocab_size = r->get_int("vocab_size", 5000);
    if (n_seconds <= 0 || vocab_size <= 0) throw DataError(path + ": n_seconds and vocab_size must be positive");
    c.n_seconds = static_cast<std::size_t>(n_seconds);
    c.vocab_size = static_cast<std::size_t>(vocab_size);
    if (r->has("targets")) {
      c.targets.clear();
      for (const auto& t : r->get_strings("targets")) c.targets.push_back(parse_target(t));
    }
    c.seed = r->get_int("seed", 0);
    c.brr.standardize_inputs = r->get_bool("standardize", true);
    const auto max_iter = r->get_int("max_iter", 300);
    if (max_iter < 1) throw DataError(path + ": max_iter must be at least 1");
    c.brr.max_iter = static_cast<std::size_t>(max_iter);
    c.brr.tol = r->get_double("tol", 1e-3);
    c.validate();
    plan.runs.push_back(std::move(c));
  }
  if (plan.runs.empty()) throw DataError(path + ": no [[runs]] defined");
  return plan;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes `<output>` (render_table csv) and `<output>.meta` with the config
/// hash and a timestamp. The report itself carries no timestamp.
inline void write_report(const ReportTable& report, const std::string& output_path) {
  const auto parent = std::filesystem::path(output_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  csv::write_file(output_path, render_table(report, TableFormat::kCsv));
  csv::write_file(output_path + ".meta", "config_hash = \"" + report.config_hash + "\"\ntimestamp = \"" +
                                             report.timestamp + "\"\n");
}

}  // namespace memorability
