#pragma once

/// The `vatok` command line: gen, select, train, score, tet, eval, ablate.
///
/// Exit codes: 0 success, 1 validation or usage error, 2 IO or file-format error.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vatok/embedding_store.hpp"
#include "vatok/error.hpp"
#include "vatok/eval.hpp"
#include "vatok/io.hpp"
#include "vatok/sets.hpp"
#include "vatok/tetg.hpp"

namespace vatok::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct GenOptions {
  std::size_t frames = 100;
  std::size_t patches = 16;
  std::size_t channels = 8;
  std::string anomaly;  // "start:end", inclusive
  std::vector<std::size_t> region;
  double shift = 2.0;
  double noise = 1.0;
  float fps = 30.0F;
  std::uint64_t seed = kDefaultSeed;
  std::string category = "Anomaly";
  std::string video_id;
  std::string out;
};

struct SelectOptions {
  std::string input;
  double k_ratio = sets::kDefaultKRatio;
  std::string out;
  std::string tokens_out;
};

struct TrainOptions {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::size_t hidden = 128;
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

struct ScoreOptions {
  std::string model;
  std::string input;
  double threshold = tetg::kDefaultThreshold;
  std::size_t smooth = 1;
  std::string out;
};

struct TetOptions {
  std::string scores;
  std::optional<double> threshold;
  std::string format = "frames";
  std::vector<std::string> categories;
  std::string categories_file;
  std::size_t smooth = 1;
  bool islands = false;
  std::string out;
};

struct EvalOptions {
  std::string scores;
  std::string labels;
  std::string selection;
  std::optional<double> threshold;
  std::size_t smooth = 1;
  std::string out;
};

struct AblateOptions {
  std::string input;
  std::string labels;
  std::string model;
  std::vector<double> k_list{0.1, 0.3, 0.5, 0.7, 0.9};
  double k_ratio = sets::kDefaultKRatio;
  double threshold = tetg::kDefaultThreshold;
  std::string out;
};

namespace detail {

inline FrameSpan parse_span(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("span must look like start:end, got '" + text + "'");
  }
  try {
    std::size_t used_start = 0;
    std::size_t used_end = 0;
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    FrameSpan span{std::stoul(a, &used_start), std::stoul(b, &used_end)};
    if (used_start != a.size() || used_end != b.size() || a.empty() || b.empty() || a[0] == '-' || b[0] == '-') {
      throw std::invalid_argument(text);
    }
    return span;
  } catch (const std::logic_error&) {
    throw ValidationError("span must look like start:end, got '" + text + "'");
  }
}

inline std::vector<std::string> read_category_file(const std::string& path) {
  std::vector<std::string> categories;
  std::istringstream lines(io::read_file(path));
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      categories.push_back(line);
    }
  }
  return categories;
}

inline double resolve_threshold(const std::optional<double>& flag, double from_file) {
  return flag.value_or(from_file);
}

inline void run_gen(const GenOptions& opt, std::ostream& out) {
  SyntheticSpec spec;
  spec.frames = opt.frames;
  spec.patches = opt.patches;
  spec.channels = opt.channels;
  if (!opt.anomaly.empty()) {
    spec.anomaly = parse_span(opt.anomaly);
  }
  spec.anomaly_region = opt.region;
  if (spec.anomaly_region.empty()) {
    const std::size_t quarter = std::max<std::size_t>(1, opt.patches / 4);
    for (std::size_t p = 0; p < quarter && p < opt.patches; ++p) {
      spec.anomaly_region.push_back(p);
    }
  }
  spec.mean_shift = opt.shift;
  spec.noise_scale = opt.noise;
  spec.fps = opt.fps;
  spec.seed = opt.seed;
  spec.category = opt.category;
  spec.video_id = opt.video_id.empty() ? std::filesystem::path(opt.out).filename().string() : opt.video_id;

  const auto video = generate_synthetic(spec);
  const std::string vaeb_path = opt.out + ".vaeb";
  const std::string labels_path = opt.out + ".labels.json";
  write_sequence(video.sequence, vaeb_path);
  write_manifest(video.labels, labels_path);
  out << "wrote " << vaeb_path << " and " << labels_path << "\n";
}

inline void run_select(const SelectOptions& opt, std::ostream& out) {
  const auto seq = read_sequence(opt.input);
  const auto selection = sets::process_sequence(seq, opt.k_ratio);
  const nlohmann::json config{{"subcommand", "select"},
                              {"input", opt.input},
                              {"k_ratio", opt.k_ratio},
                              {"tokens_out", opt.tokens_out}};
  sets::write_selection(selection, opt.out, config);
  if (!opt.tokens_out.empty()) {
    sets::write_token_sidecar(selection, opt.tokens_out);
  }
  out << "selected " << selection.stats.mean_selected << " of " << selection.num_patches
      << " tokens per frame (compression " << selection.stats.compression_ratio << ")\n";
}

inline void run_train(const TrainOptions& opt, std::ostream& out) {
  if (opt.inputs.size() != opt.labels.size()) {
    throw ValidationError("each --input needs a matching --labels");
  }
  std::vector<std::vector<double>> normals;
  std::vector<std::vector<double>> anomalies;
  for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
    const auto seq = read_sequence(opt.inputs[i]);
    const auto labels = read_manifest(opt.labels[i]);
    tetg::split_by_label(seq, labels, normals, anomalies);
  }
  tetg::TrainConfig config;
  config.hidden = opt.hidden;
  config.epochs = opt.epochs;
  config.learning_rate = opt.learning_rate;
  config.batch_size = opt.batch_size;
  config.seed = opt.seed;
  const auto result = tetg::train(normals, anomalies, config);

  auto j = tetg::model_to_json(result.model);
  j["config"] = {{"subcommand", "train"}, {"inputs", opt.inputs}, {"labels", opt.labels}};
  j["training_log"] = {{"epoch_loss", result.log.epoch_loss}};
  vatok::detail::write_json_file(opt.out, j);
  out << "trained on " << normals.size() << " normal and " << anomalies.size() << " anomalous frames; final loss "
      << (result.log.epoch_loss.empty() ? 0.0 : result.log.epoch_loss.back()) << "\n";
}

inline void run_score(const ScoreOptions& opt, std::ostream& out) {
  tetg::check_threshold(opt.threshold);
  const auto model = tetg::read_model(opt.model);
  const auto seq = read_sequence(opt.input);
  const auto scored = tetg::smooth_scores(tetg::score_sequence(model, seq), opt.smooth);
  auto j = tetg::scores_to_json(scored, opt.threshold);
  j["config"] = {{"subcommand", "score"},
                 {"model", opt.model},
                 {"input", opt.input},
                 {"threshold", opt.threshold},
                 {"smooth", opt.smooth}};
  vatok::detail::write_json_file(opt.out, j);
  out << "scored " << scored.scores.size() << " frames\n";
}

inline void run_tet(const TetOptions& opt, std::ostream& out, std::ostream& err) {
  const auto file = tetg::read_scores(opt.scores);
  const double threshold = resolve_threshold(opt.threshold, file.threshold);
  const auto format = tetg::parse_timestamp_format(opt.format);
  std::vector<std::string> categories = opt.categories;
  if (!opt.categories_file.empty()) {
    categories = read_category_file(opt.categories_file);
  }
  if (categories.empty()) {
    categories = tetg::default_categories();
  }
  const auto scored = tetg::smooth_scores(file.scored, opt.smooth);

  std::vector<tetg::TemporalInterval> intervals;
  if (opt.islands) {
    intervals = tetg::extract_islands(scored, threshold);
  } else {
    const auto interval = tetg::extract_interval(scored, threshold);
    if (interval.present) {
      intervals.push_back(interval);
    }
  }
  std::string text;
  for (const auto& interval : intervals) {
    text += tetg::render_tet(interval, scored.fps, categories, format).text + "\n";
  }
  io::write_file(opt.out, text);
  if (intervals.empty()) {
    err << "no frame reached threshold " << threshold << "; wrote an empty prompt file\n";
  } else {
    out << "wrote " << intervals.size() << " prompt(s) to " << opt.out << "\n";
  }
}

inline void run_eval(const EvalOptions& opt, std::ostream& out) {
  const auto file = tetg::read_scores(opt.scores);
  const auto labels = read_manifest(opt.labels);
  const double threshold = resolve_threshold(opt.threshold, file.threshold);
  const auto scored = tetg::smooth_scores(file.scored, opt.smooth);
  if (scored.scores.size() != labels.num_frames) {
    throw ValidationError("scores cover " + std::to_string(scored.scores.size()) + " frames, labels " +
                          std::to_string(labels.num_frames));
  }

  eval::EvalReport report;
  report.frame_auc = eval::frame_auc(scored, labels);
  report.temporal_iou = eval::temporal_iou(tetg::extract_interval(scored, threshold), labels.enclosing_span());
  if (!opt.selection.empty()) {
    const auto j = vatok::detail::parse_json_file(opt.selection);
    try {
      std::vector<std::size_t> counts;
      for (const auto& frame : j.at("frames")) {
        counts.push_back(frame.at("selected_count").get<std::size_t>());
      }
      report.compression_ratio = eval::token_stats(counts, j.at("num_patches").get<std::size_t>()).compression_ratio;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("'" + opt.selection + "' does not match the selection schema: " + e.what());
    }
  }
  report.config = {{"subcommand", "eval"},     {"scores", opt.scores},
                   {"labels", opt.labels},     {"selection", opt.selection},
                   {"threshold", threshold},   {"smooth", opt.smooth}};
  eval::write_report(report, opt.out);
  out << "frame_auc " << report.frame_auc << " temporal_iou " << report.temporal_iou << "\n";
}

inline bool run_ablate(const AblateOptions& opt, std::ostream& out, std::ostream& err) {
  tetg::check_threshold(opt.threshold);
  const auto seq = read_sequence(opt.input);
  const auto labels = read_manifest(opt.labels);
  const auto model = tetg::read_model(opt.model);

  eval::EvalReport report;
  report.per_k_results = eval::ablate_k(seq, labels, model, opt.k_list, opt.threshold);
  const auto scored = tetg::score_sequence(model, seq);
  report.frame_auc = eval::frame_auc(scored, labels);
  report.temporal_iou =
      eval::temporal_iou(tetg::extract_interval(scored, opt.threshold), labels.enclosing_span());
  report.compression_ratio = eval::token_stats(sets::process_sequence(seq, opt.k_ratio)).compression_ratio;
  std::vector<double> k_sorted;
  for (const auto& row : report.per_k_results) {
    k_sorted.push_back(row.k);
  }
  report.config = {{"subcommand", "ablate"}, {"input", opt.input},         {"labels", opt.labels},
                   {"model", opt.model},     {"k_list", k_sorted},        {"k_ratio", opt.k_ratio},
                   {"threshold", opt.threshold}};
  eval::write_report(report, opt.out);
  for (const auto& row : report.per_k_results) {
    out << "k=" << row.k << " budget=" << row.budget << " selected/frame=" << row.selected_per_frame
        << " iou=" << row.iou << " auc=" << row.auc << (row.budget_ok ? "" : "  BUDGET VIOLATION") << "\n";
  }
  if (!report.budget_law_holds()) {
    err << "budget law violated\n";
    return false;
  }
  return true;
}

}  // namespace detail

/// Parses argv and dispatches one subcommand. Nothing is written to stdout or
/// stderr other than through `out` and `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective-token pipeline for video anomaly understanding", "vatok"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic labeled embedding sequence");
  gen_cmd->add_option("--frames", gen.frames, "Frame count T")->capture_default_str();
  gen_cmd->add_option("--patches", gen.patches, "Patches per frame N")->capture_default_str();
  gen_cmd->add_option("--channels", gen.channels, "Channels C")->capture_default_str();
  gen_cmd->add_option("--anomaly", gen.anomaly, "Anomalous frame span start:end (inclusive)");
  gen_cmd->add_option("--region", gen.region, "Patch indices shifted during the anomaly (default: first N/4)")
      ->delimiter(',');
  gen_cmd->add_option("--shift", gen.shift, "Mean shift inside the anomaly")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Noise scale")->capture_default_str();
  gen_cmd->add_option("--fps", gen.fps, "Frames per second")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--category", gen.category, "Category of the planted anomaly")->capture_default_str();
  gen_cmd->add_option("--video-id", gen.video_id, "Video id (default: output file name)");
  gen_cmd->add_option("--out", gen.out, "Output prefix; writes <out>.vaeb and <out>.labels.json")->required();

  SelectOptions select;
  auto* select_cmd = app.add_subcommand("select", "Select spatial effective tokens per frame");
  select_cmd->add_option("--input", select.input, "VAEB file")->required();
  select_cmd->add_option("--k", select.k_ratio, "Ratio of patches kept per frame")->capture_default_str();
  select_cmd->add_option("--out", select.out, "Selection JSON")->required();
  select_cmd->add_option("--tokens-out", select.tokens_out, "Optional binary sidecar of selected token values");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the anomaly-aware frame classifier");
  train_cmd->add_option("--input", train.inputs, "VAEB file (repeatable)")->required();
  train_cmd->add_option("--labels", train.labels, "Label manifest, one per --input")->required();
  train_cmd->add_option("--hidden", train.hidden, "Hidden width")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--batch", train.batch_size, "Batch size")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model JSON")->required();

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score every frame with a trained classifier");
  score_cmd->add_option("--model", score.model, "Model JSON")->required();
  score_cmd->add_option("--input", score.input, "VAEB file")->required();
  score_cmd->add_option("--threshold", score.threshold, "Threshold recorded in the scores file")
      ->capture_default_str();
  score_cmd->add_option("--smooth", score.smooth, "Moving-average window (odd, 1 = off)")->capture_default_str();
  score_cmd->add_option("--out", score.out, "Scores JSON")->required();

  TetOptions tet;
  auto* tet_cmd = app.add_subcommand("tet", "Render the temporal prompt from frame scores");
  tet_cmd->add_option("--scores", tet.scores, "Scores JSON")->required();
  tet_cmd->add_option("--threshold", tet.threshold, "Score threshold (default: the scores file's, 0.5)");
  tet_cmd->add_option("--format", tet.format, "Timestamp format: frames or seconds")->capture_default_str();
  tet_cmd->add_option("--categories", tet.categories, "Comma-separated category names")->delimiter(',');
  tet_cmd->add_option("--categories-file", tet.categories_file, "File with one category per line");
  tet_cmd->add_option("--smooth", tet.smooth, "Moving-average window (odd, 1 = off)")->capture_default_str();
  tet_cmd->add_flag("--islands", tet.islands, "One prompt per run of qualifying frames");
  tet_cmd->add_option("--out", tet.out, "Prompt text file")->required();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate frame scores against labels");
  eval_cmd->add_option("--scores", ev.scores, "Scores JSON")->required();
  eval_cmd->add_option("--labels", ev.labels, "Label manifest")->required();
  eval_cmd->add_option("--selection", ev.selection, "Selection JSON for the token-budget column");
  eval_cmd->add_option("--threshold", ev.threshold, "Score threshold (default: the scores file's, 0.5)");
  eval_cmd->add_option("--smooth", ev.smooth, "Moving-average window (odd, 1 = off)")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Report JSON")->required();

  AblateOptions ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Sweep the token ratio K");
  ablate_cmd->add_option("--input", ablate.input, "VAEB file")->required();
  ablate_cmd->add_option("--labels", ablate.labels, "Label manifest")->required();
  ablate_cmd->add_option("--model", ablate.model, "Model JSON")->required();
  ablate_cmd->add_option("--k-list", ablate.k_list, "Comma-separated K values")->delimiter(',')->capture_default_str();
  ablate_cmd->add_option("--k", ablate.k_ratio, "K for the headline compression ratio")->capture_default_str();
  ablate_cmd->add_option("--threshold", ablate.threshold, "Score threshold")->capture_default_str();
  ablate_cmd->add_option("--out", ablate.out, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*gen_cmd) {
      detail::run_gen(gen, out);
    } else if (*select_cmd) {
      detail::run_select(select, out);
    } else if (*train_cmd) {
      detail::run_train(train, out);
    } else if (*score_cmd) {
      detail::run_score(score, out);
    } else if (*tet_cmd) {
      detail::run_tet(tet, out, err);
    } else if (*eval_cmd) {
      detail::run_eval(ev, out);
    } else if (*ablate_cmd) {
      return detail::run_ablate(ablate, out, err) ? kExitOk : kExitValidation;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

/// Convenience overload: `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"vatok"};
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace vatok::cli
