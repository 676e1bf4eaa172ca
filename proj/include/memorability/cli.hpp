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

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memorability/audio_features.hpp"
#include "memorability/bayesian_ridge.hpp"
#include "memorability/dataset.hpp"
#include "memorability/experiment.hpp"
#include "memorability/feature_store.hpp"
#include "memorability/rank_metrics.hpp"
#include "memorability/report.hpp"
#include "memorability/synthetic.hpp"

namespace memorability::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

inline std::optional<std::set<std::string>> read_id_filter(const std::string& path) {
  if (path.empty()) return std::nullopt;
  const auto ids = read_id_list(path);
  return std::set<std::string>(ids.begin(), ids.end());
}

struct Predictions {
  std::map<std::string, double> mean;
};

inline Predictions load_predictions(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw DataError(path + ": empty prediction file");
  const auto header = csv::split_line(lines.front().text);
  if (header.size() < 2 || csv::trim(header[0]) != "video_id" || csv::trim(header[1]) != "prediction")
    throw DataError(at_line(path, lines.front().number) + ": header must start with video_id,prediction");
  Predictions p;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = csv::split_line(lines[i].text);
    if (cells.size() != header.size()) throw DataError(at_line(path, lines[i].number) + ": wrong number of fields");
    const auto v = csv::parse_double(cells[1]);
    if (!v || !std::isfinite(*v)) throw DataError(at_line(path, lines[i].number) + ": bad prediction value");
    if (!p.mean.emplace(csv::trim(cells[0]), *v).second)
      throw DataError(at_line(path, lines[i].number) + ": duplicate video_id '" + csv::trim(cells[0]) + "'");
  }
  return p;
}

/// Fixes the number of frames: truncates or appends zero rows.
inline Eigen::MatrixXd fit_frames(const Eigen::MatrixXd& m, Eigen::Index frames) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(frames, m.cols());
  const Eigen::Index keep = std::min(frames, m.rows());
  out.topRows(keep) = m.topRows(keep);
  return out;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Memorability prediction toolkit: features, Bayesian ridge regression, rank-correlation evaluation"};
  app.name("memorability");
  app.require_subcommand(1);

  std::string manifest_path, truth_path, captions_path;
  auto* validate = app.add_subcommand("validate", "Check a split manifest against its ground truth");
  validate->add_option("--manifest", manifest_path, "Split manifest (TOML)")->required();
  validate->add_option("--truth", truth_path, "Ground-truth CSV")->required();

  std::vector<std::string> wav_paths;
  std::string out_dir, features_out;
  int frames = 300;
  bool scale_unit = false;
  auto* extract = app.add_subcommand("extract-audio", "WAV files to MFCC stacks (.tns) and flat feature rows");
  extract->add_option("wavs", wav_paths, "PCM-16 WAV files (id = file stem)")->required();
  extract->add_option("--out-dir", out_dir, "Directory for <id>.tns tensor dumps")->required();
  extract->add_option("--features", features_out, "Also write a mfcc_stack_flat feature CSV");
  extract->add_option("--frames", frames, "Frames per feature row (truncate / zero-pad)")->check(CLI::PositiveNumber);
  extract->add_flag("--scale", scale_unit, "Min-max scale each channel to [0,1]");

  std::string features_path, target_name, model_path, ids_path, pred_path;
  bool no_standardize = false;
  auto* train = app.add_subcommand("train", "Fit a Bayesian ridge model on one target");
  train->add_option("--features", features_path, "Per-video feature CSV")->required();
  train->add_option("--truth", truth_path, "Ground-truth CSV")->required();
  train->add_option("--target", target_name, "short_raw | short_norm | long")->required();
  train->add_option("--model", model_path, "Output model file")->required();
  train->add_option("--ids", ids_path, "Restrict training to these ids (one per line)");
  train->add_flag("--no-standardize", no_standardize, "Do not scale input columns");

  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--features", features_path, "Per-video feature CSV")->required();
  predict_cmd->add_option("--out", pred_path, "Output CSV video_id,prediction,stddev")->required();
  predict_cmd->add_option("--ids", ids_path, "Restrict to these ids (one per line)");

  auto* evaluate = app.add_subcommand("evaluate", "Spearman and Pearson scores of predictions");
  evaluate->add_option("--pred", pred_path, "Prediction CSV")->required();
  evaluate->add_option("--truth", truth_path, "Ground-truth CSV")->required();
  evaluate->add_option("--target", target_name, "short_raw | short_norm | long")->required();

  std::string config_path, report_out, print_format = "plain";
  auto* experiment = app.add_subcommand("experiment", "Run every [[runs]] entry of an experiment file");
  experiment->add_option("--config", config_path, "Experiment file (TOML)")->required();
  experiment->add_option("--out", report_out, "Report CSV (overrides the file's 'output')");
  experiment->add_option("--format", print_format, "Table printed to stdout")
      ->check(CLI::IsMember({"plain", "csv", "markdown"}));

  std::string spec_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fixture");
  synth->add_option("--spec", spec_path, "Synthetic spec (TOML)")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string report_in, report_format = "markdown";
  auto* report_cmd = app.add_subcommand("report", "Render a report.csv as a table");
  report_cmd->add_option("--in", report_in, "report.csv")->required();
  report_cmd->add_option("--format", report_format, "plain | csv | markdown")
      ->check(CLI::IsMember({"plain", "csv", "markdown"}));
  report_cmd->add_option("--out", report_out, "Write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) err << sub->help();
    else err << app.help();
    return kExitUsage;
  }

  try {
    if (validate->parsed()) {
      const SplitManifest manifest = load_manifest(manifest_path);
      const GroundTruthTable gt = load_ground_truth(truth_path, manifest.dataset_id);
      const ValidationReport report = validate_splits(manifest, gt);
      if (report.ok()) {
        out << "OK: " << manifest.dataset_id << "\n";
        return kExitOk;
      }
      for (const auto& f : report.findings) out << f.message << "\n";
      err << report.findings.size() << " validation finding(s)\n";
      return kExitData;
    }

    if (extract->parsed()) {
      namespace fs = std::filesystem;
      fs::create_directories(out_dir);
      const audio::MfccParams params;
      FeatureTable table;
      table.modality = Modality::kMfccStackFlat;
      for (const auto& wav : wav_paths) {
        const std::string id = fs::path(wav).stem().string();
        const audio::AudioClip clip = audio::decode_wav(wav, params.sample_rate);
        const Eigen::MatrixXd mfcc = audio::compute_mfcc(clip, params);
        audio::MfccStack stack = audio::stack_mfcc_channels(mfcc, params.delta_window);
        if (scale_unit) stack = audio::scale_channels_unit(stack);
        csv::write_file((fs::path(out_dir) / (id + ".tns")).string(), audio::render_tns(stack));
        if (!features_out.empty()) {
          audio::MfccStack fixed;
          for (std::size_t c = 0; c < 3; ++c) fixed.channels[c] = detail::fit_frames(stack.channels[c], frames);
          table.insert(id, audio::flatten(fixed));
        }
        out << id << ": " << stack.frames() << " frames x " << stack.n_coeffs() << " coefficients x 3 channels\n";
      }
      if (!features_out.empty()) write_feature_table(table, features_out);
      return kExitOk;
    }

    if (train->parsed()) {
      const Target target = parse_target(target_name);
      const FeatureTable features = load_feature_table(features_path, Modality::kVisual, "");
      const GroundTruthTable gt = load_ground_truth(truth_path, "");
      const auto filter = detail::read_id_filter(ids_path);
      std::vector<std::string> ids;
      for (const auto& [id, v] : features.rows) {
        if (filter && !filter->count(id)) continue;
        const TargetScores* s = gt.find(id);
        if (s && s->get(target)) ids.push_back(id);
      }
      if (ids.size() < 2) throw DataError("fewer than two videos have both features and a " + target_name + " score");
      Eigen::MatrixXd X(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(features.dim));
      Eigen::VectorXd y(static_cast<Eigen::Index>(ids.size()));
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& row = *features.find(ids[i]);
        for (std::size_t j = 0; j < row.size(); ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        y(static_cast<Eigen::Index>(i)) = *gt.find(ids[i])->get(target);
      }
      BRRConfig cfg;
      cfg.standardize_inputs = !no_standardize;
      const BRRModel model = fit(X, y, cfg);
      save_model(model, model_path);
      out << "trained on " << ids.size() << " videos: alpha " << csv::significant(model.alpha, 6) << ", lambda "
          << csv::significant(model.lambda, 6) << ", " << model.iterations << " iterations"
          << (model.converged ? "" : " (max_iter reached)") << "\n";
      return kExitOk;
    }

    if (predict_cmd->parsed()) {
      const BRRModel model = load_model(model_path);
      const FeatureTable features = load_feature_table(features_path, Modality::kVisual, "");
      const auto filter = detail::read_id_filter(ids_path);
      std::string text = "video_id,prediction,stddev\n";
      for (const auto& [id, v] : features.rows) {
        if (filter && !filter->count(id)) continue;
        const Prediction p = predict(model, Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
        text += csv::escape(id) + "," + csv::significant(p.mean, 9) + "," + csv::significant(p.stddev, 9) + "\n";
      }
      csv::write_file(pred_path, text);
      return kExitOk;
    }

    if (evaluate->parsed()) {
      const Target target = parse_target(target_name);
      const auto preds = detail::load_predictions(pred_path);
      const GroundTruthTable gt = load_ground_truth(truth_path, "");
      ScorePair pair;
      for (const auto& [id, p] : preds.mean) {
        const TargetScores* s = gt.find(id);
        if (s && s->get(target)) {
          pair.predicted.push_back(p);
          pair.actual.push_back(*s->get(target));
        }
      }
      if (pair.predicted.size() < 2)
        throw DataError("fewer than two predicted videos have a " + target_name + " score");
      out << "spearman " << csv::fixed(spearman(pair), 6) << "\n";
      out << "pearson " << csv::fixed(pearson(pair), 6) << "\n";
      out << "n " << pair.predicted.size() << "\n";
      return kExitOk;
    }

    if (experiment->parsed()) {
      ExperimentPlan plan = load_experiment(config_path);
      ReportTable report = run_experiments(plan.runs, plan.stores);
      report.config_hash = plan.config_hash;
      report.timestamp = utc_timestamp();
      const std::string path = report_out.empty() ? plan.output_path : report_out;
      write_report(report, path);
      out << render_table(report, parse_table_format(print_format));
      return kExitOk;
    }

    if (synth->parsed()) {
      const SyntheticSpec spec = load_synthetic_spec(spec_path);
      const auto datasets = generate_synthetic(spec);
      write_synthetic(datasets, out_dir);
      for (const auto& d : datasets)
        out << d.manifest.dataset_id << ": " << d.ground_truth.rows.size() << " videos\n";
      return kExitOk;
    }

    if (report_cmd->parsed()) {
      const ReportTable report = parse_report_csv(csv::read_file(report_in), report_in);
      const std::string text = render_table(report, parse_table_format(report_format));
      if (report_out.empty()) out << text;
      else csv::write_file(report_out, text);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace memorability::cli
