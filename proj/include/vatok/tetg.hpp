#pragma once

/// Anomaly-aware frame classifier and temporal prompt generation.
///
/// The classifier is a one-hidden-layer ReLU MLP over class embeddings that
/// outputs a logit f(z). It is trained so that NORMAL frames get a high logit:
///
///   L = mean_normal[-log sigmoid(f(z))] + mean_anomalous[-log(1 - sigmoid(f(z)))]
///
/// so the anomaly score exposed to callers is 1 - sigmoid(f(z)). Frames whose
/// score reaches a threshold define the anomaly span, which is rendered into a
/// fixed natural-language prompt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vatok/embedding_store.hpp"
#include "vatok/error.hpp"
#include "vatok/random.hpp"

namespace vatok::tetg {

inline constexpr int kModelFileVersion = 1;
inline constexpr double kDefaultThreshold = 0.5;

struct TrainConfig {
  std::size_t hidden = 128;
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  // Adam moments.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// C -> H (ReLU) -> 1 (identity). Parameters live in one flat vector:
/// W1 (H x C, row-major), b1 (H), w2 (H), b2 (1).
class AnomalyModel {
 public:
  AnomalyModel() = default;
  AnomalyModel(std::size_t input_dim, std::size_t hidden)
      : input_dim_(input_dim), hidden_(hidden), params_(parameter_count(input_dim, hidden), 0.0) {
    vatok::detail::require(input_dim >= 1 && hidden >= 1, "model dimensions must be positive");
  }

  [[nodiscard]] static std::size_t parameter_count(std::size_t input_dim, std::size_t hidden) {
    return hidden * input_dim + 2 * hidden + 1;
  }

  [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
  [[nodiscard]] std::size_t hidden() const { return hidden_; }
  [[nodiscard]] std::vector<std::size_t> layer_dims() const { return {input_dim_, hidden_, 1}; }

  [[nodiscard]] std::span<double> parameters() { return params_; }
  [[nodiscard]] std::span<const double> parameters() const { return params_; }

  [[nodiscard]] double& w1(std::size_t h, std::size_t c) { return params_[h * input_dim_ + c]; }
  [[nodiscard]] double w1(std::size_t h, std::size_t c) const { return params_[h * input_dim_ + c]; }
  [[nodiscard]] double& b1(std::size_t h) { return params_[hidden_ * input_dim_ + h]; }
  [[nodiscard]] double b1(std::size_t h) const { return params_[hidden_ * input_dim_ + h]; }
  [[nodiscard]] double& w2(std::size_t h) { return params_[hidden_ * input_dim_ + hidden_ + h]; }
  [[nodiscard]] double w2(std::size_t h) const { return params_[hidden_ * input_dim_ + hidden_ + h]; }
  [[nodiscard]] double& b2() { return params_.back(); }
  [[nodiscard]] double b2() const { return params_.back(); }

  TrainConfig train_config;

  friend bool operator==(const AnomalyModel&, const AnomalyModel&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

/// Gradient vector in the same flat layout as AnomalyModel::parameters().
using Gradients = std::vector<double>;

namespace detail {

inline void check_input(const AnomalyModel& model, std::span<const double> z) {
  if (z.size() != model.input_dim()) {
    throw ValidationError("input dimension " + std::to_string(z.size()) + " does not match model input " +
                          std::to_string(model.input_dim()));
  }
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline void check_batch(const AnomalyModel& model, std::span<const std::vector<double>> normals,
                        std::span<const std::vector<double>> anomalies) {
  if (normals.empty() && anomalies.empty()) {
    throw ValidationError("loss needs at least one sample");
  }
  for (const auto& z : normals) {
    check_input(model, z);
  }
  for (const auto& z : anomalies) {
    check_input(model, z);
  }
}

}  // namespace detail

inline double sigmoid(double x) { return detail::sigmoid(x); }

[[nodiscard]] inline double forward(const AnomalyModel& model, std::span<const double> z) {
  detail::check_input(model, z);
  double logit = model.b2();
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    double pre = model.b1(h);
    for (std::size_t c = 0; c < model.input_dim(); ++c) {
      pre += model.w1(h, c) * z[c];
    }
    logit += model.w2(h) * std::max(pre, 0.0);
  }
  return logit;
}

/// Class-balanced binary loss; an empty class contributes no term.
[[nodiscard]] inline double bce_loss(const AnomalyModel& model, std::span<const std::vector<double>> normals,
                                     std::span<const std::vector<double>> anomalies) {
  detail::check_batch(model, normals, anomalies);
  double loss = 0.0;
  if (!normals.empty()) {
    double sum = 0.0;
    for (const auto& z : normals) {
      sum += detail::softplus(-forward(model, z));  // -log sigmoid(f)
    }
    loss += sum / static_cast<double>(normals.size());
  }
  if (!anomalies.empty()) {
    double sum = 0.0;
    for (const auto& z : anomalies) {
      sum += detail::softplus(forward(model, z));  // -log(1 - sigmoid(f))
    }
    loss += sum / static_cast<double>(anomalies.size());
  }
  return loss;
}

namespace detail {

/// Adds weight * d f(z) / d params into `grad`.
inline void accumulate_logit_gradient(const AnomalyModel& model, std::span<const double> z, double weight,
                                      Gradients& grad) {
  const std::size_t cdim = model.input_dim();
  const std::size_t hdim = model.hidden();
  const std::size_t b1_at = hdim * cdim;
  const std::size_t w2_at = b1_at + hdim;
  for (std::size_t h = 0; h < hdim; ++h) {
    double pre = model.b1(h);
    for (std::size_t c = 0; c < cdim; ++c) {
      pre += model.w1(h, c) * z[c];
    }
    if (pre > 0.0) {
      grad[w2_at + h] += weight * pre;
      const double upstream = weight * model.w2(h);
      grad[b1_at + h] += upstream;
      for (std::size_t c = 0; c < cdim; ++c) {
        grad[h * cdim + c] += upstream * z[c];
      }
    }
  }
  grad.back() += weight;
}

}  // namespace detail

/// Analytic gradient of bce_loss. ReLU'(0) is taken as 0.
[[nodiscard]] inline Gradients gradient(const AnomalyModel& model, std::span<const std::vector<double>> normals,
                                        std::span<const std::vector<double>> anomalies) {
  detail::check_batch(model, normals, anomalies);
  Gradients grad(model.parameters().size(), 0.0);
  // d/df softplus(-f) = sigmoid(f) - 1 ; d/df softplus(f) = sigmoid(f)
  for (const auto& z : normals) {
    const double dl = (detail::sigmoid(forward(model, z)) - 1.0) / static_cast<double>(normals.size());
    detail::accumulate_logit_gradient(model, z, dl, grad);
  }
  for (const auto& z : anomalies) {
    const double dl = detail::sigmoid(forward(model, z)) / static_cast<double>(anomalies.size());
    detail::accumulate_logit_gradient(model, z, dl, grad);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Serialization

[[nodiscard]] inline nlohmann::json model_to_json(const AnomalyModel& model) {
  nlohmann::json w1 = nlohmann::json::array();
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    std::vector<double> row(model.input_dim());
    for (std::size_t c = 0; c < model.input_dim(); ++c) {
      row[c] = model.w1(h, c);
    }
    w1.push_back(row);
  }
  std::vector<double> b1(model.hidden());
  std::vector<double> w2(model.hidden());
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    b1[h] = model.b1(h);
    w2[h] = model.w2(h);
  }
  const auto& cfg = model.train_config;
  return nlohmann::json{
      {"version", kModelFileVersion},
      {"layer_dims", model.layer_dims()},
      {"weights", nlohmann::json::array({w1, nlohmann::json::array({w2})})},
      {"biases", nlohmann::json::array({b1, nlohmann::json::array({model.b2()})})},
      {"activation", "relu"},
      {"train_config",
       {{"hidden", model.hidden()},
        {"learning_rate", cfg.learning_rate},
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"seed", cfg.seed},
        {"optimizer", "adam"},
        {"beta1", cfg.beta1},
        {"beta2", cfg.beta2},
        {"epsilon", cfg.epsilon},
        {"schedule", "constant"}}},
      {"seed", cfg.seed}};
}

[[nodiscard]] inline AnomalyModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kModelFileVersion) {
      throw FormatError("unsupported model file version");
    }
    if (j.at("activation").get<std::string>() != "relu") {
      throw FormatError("unsupported activation '" + j.at("activation").get<std::string>() + "'");
    }
    const auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3 || dims[2] != 1 || dims[0] == 0 || dims[1] == 0) {
      throw FormatError("layer_dims must be [C, H, 1]");
    }
    AnomalyModel model(dims[0], dims[1]);
    const auto w1 = j.at("weights").at(0).get<std::vector<std::vector<double>>>();
    const auto w2 = j.at("weights").at(1).get<std::vector<std::vector<double>>>();
    const auto b1 = j.at("biases").at(0).get<std::vector<double>>();
    const auto b2 = j.at("biases").at(1).get<std::vector<double>>();
    if (w1.size() != dims[1] || w2.size() != 1 || w2[0].size() != dims[1] || b1.size() != dims[1] || b2.size() != 1) {
      throw FormatError("weight shapes do not match layer_dims");
    }
    for (std::size_t h = 0; h < dims[1]; ++h) {
      if (w1[h].size() != dims[0]) {
        throw FormatError("weight shapes do not match layer_dims");
      }
      for (std::size_t c = 0; c < dims[0]; ++c) {
        model.w1(h, c) = w1[h][c];
      }
      model.b1(h) = b1[h];
      model.w2(h) = w2[0][h];
    }
    model.b2() = b2[0];
    if (!std::ranges::all_of(model.parameters(), [](double v) { return std::isfinite(v); })) {
      throw FormatError("model parameters must be finite");
    }
    const auto& cfg = j.at("train_config");
    model.train_config.hidden = dims[1];
    model.train_config.learning_rate = cfg.at("learning_rate").get<double>();
    model.train_config.epochs = cfg.at("epochs").get<std::size_t>();
    model.train_config.batch_size = cfg.at("batch_size").get<std::size_t>();
    model.train_config.seed = j.at("seed").get<std::uint64_t>();
    model.train_config.beta1 = cfg.value("beta1", 0.9);
    model.train_config.beta2 = cfg.value("beta2", 0.999);
    model.train_config.epsilon = cfg.value("epsilon", 1e-8);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model JSON does not match the expected schema: ") + e.what());
  }
}

inline void write_model(const AnomalyModel& model, const std::filesystem::path& path) {
  vatok::detail::write_json_file(path, model_to_json(model));
}

[[nodiscard]] inline AnomalyModel read_model(const std::filesystem::path& path) {
  return model_from_json(vatok::detail::parse_json_file(path));
}

// ---------------------------------------------------------------------------
// Training

struct TrainingLog {
  std::vector<double> epoch_loss;  // full-data loss after each epoch
};

struct TrainResult {
  AnomalyModel model;
  TrainingLog log;
};

/// He-initialized hidden layer, zero biases, N(0, 1/H) output weights.
[[nodiscard]] inline AnomalyModel init_model(std::size_t input_dim, const TrainConfig& config) {
  AnomalyModel model(input_dim, config.hidden);
  model.train_config = config;
  Rng rng(config.seed);
  const double w1_scale = std::sqrt(2.0 / static_cast<double>(input_dim));
  const double w2_scale = std::sqrt(1.0 / static_cast<double>(config.hidden));
  for (std::size_t h = 0; h < config.hidden; ++h) {
    for (std::size_t c = 0; c < input_dim; ++c) {
      model.w1(h, c) = w1_scale * rng.normal();
    }
  }
  for (std::size_t h = 0; h < config.hidden; ++h) {
    model.w2(h) = w2_scale * rng.normal();
  }
  return model;
}

/// Mini-batch Adam on bce_loss. Each epoch shuffles normals and anomalies
/// together with a generator seeded from config.seed; a batch missing one
/// class contributes only the other class's term.
[[nodiscard]] inline TrainResult train(std::span<const std::vector<double>> normals,
                                       std::span<const std::vector<double>> anomalies, const TrainConfig& config) {
  vatok::detail::require(!normals.empty(), "training needs at least one normal sample");
  vatok::detail::require(!anomalies.empty(), "training needs at least one anomalous sample");
  vatok::detail::require(config.hidden >= 1, "hidden width must be positive");
  vatok::detail::require(config.batch_size >= 1, "batch size must be positive");
  vatok::detail::require(std::isfinite(config.learning_rate) && config.learning_rate > 0.0,
                         "learning rate must be positive");
  const std::size_t input_dim = normals.front().size();
  vatok::detail::require(input_dim >= 1, "samples must have positive dimension");

  TrainResult result{init_model(input_dim, config), {}};
  AnomalyModel& model = result.model;
  detail::check_batch(model, normals, anomalies);
  const auto finite = [](const std::vector<double>& z) {
    return std::ranges::all_of(z, [](double v) { return std::isfinite(v); });
  };
  vatok::detail::require(std::ranges::all_of(normals, finite) && std::ranges::all_of(anomalies, finite),
                         "training samples must be finite");

  // Sample ids: [0, normals) are normal, the rest anomalous.
  std::vector<std::size_t> order(normals.size() + anomalies.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  Rng shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  const std::size_t param_count = model.parameters().size();
  std::vector<double> m(param_count, 0.0);
  std::vector<double> v(param_count, 0.0);
  std::uint64_t step = 0;
  std::vector<std::vector<double>> batch_normals;
  std::vector<std::vector<double>> batch_anomalies;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch_normals.clear();
      batch_anomalies.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t id = order[i];
        if (id < normals.size()) {
          batch_normals.push_back(normals[id]);
        } else {
          batch_anomalies.push_back(anomalies[id - normals.size()]);
        }
      }
      const Gradients grad = gradient(model, batch_normals, batch_anomalies);
      ++step;
      const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto params = model.parameters();
      for (std::size_t p = 0; p < param_count; ++p) {
        m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * grad[p];
        v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * grad[p] * grad[p];
        const double m_hat = m[p] / correction1;
        const double v_hat = v[p] / correction2;
        params[p] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
      }
    }
    const double loss = bce_loss(model, normals, anomalies);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                            " (loss=" + std::to_string(loss) + "); model state: " + model_to_json(model).dump());
    }
    result.log.epoch_loss.push_back(loss);
  }
  return result;
}

/// Splits a sequence's class embeddings into (normal, anomalous) by frame label.
inline void split_by_label(const FrameSequence& seq, const LabelManifest& labels,
                           std::vector<std::vector<double>>& normals, std::vector<std::vector<double>>& anomalies) {
  if (labels.frame_labels.size() != seq.num_frames()) {
    throw ValidationError("label count " + std::to_string(labels.frame_labels.size()) + " does not match frame count " +
                          std::to_string(seq.num_frames()));
  }
  for (std::size_t t = 0; t < seq.num_frames(); ++t) {
    const auto& z = seq.frames[t].class_embedding;
    std::vector<double> sample(z.begin(), z.end());
    (labels.frame_labels[t] == 1 ? anomalies : normals).push_back(std::move(sample));
  }
}

// ---------------------------------------------------------------------------
// Scoring and intervals

struct ScoredSequence {
  std::string video_id;
  std::vector<double> scores;  // anomaly confidence in [0, 1]
  double fps = 1.0;
};

/// Anomaly confidence for a class embedding: 1 - sigmoid(f(z)).
[[nodiscard]] inline double anomaly_score(const AnomalyModel& model, std::span<const double> z) {
  return detail::sigmoid(-forward(model, z));
}

[[nodiscard]] inline ScoredSequence score_sequence(const AnomalyModel& model, const FrameSequence& seq) {
  seq.validate();
  if (seq.channels() != model.input_dim()) {
    throw ValidationError("class embedding dimension " + std::to_string(seq.channels()) +
                          " does not match model input " + std::to_string(model.input_dim()));
  }
  ScoredSequence out{seq.video_id, {}, static_cast<double>(seq.fps)};
  out.scores.reserve(seq.num_frames());
  std::vector<double> z(seq.channels());
  for (const auto& frame : seq.frames) {
    std::copy(frame.class_embedding.begin(), frame.class_embedding.end(), z.begin());
    out.scores.push_back(anomaly_score(model, z));
  }
  return out;
}

/// Centered moving average with a window of `window` frames (odd; 1 = no-op).
/// Near the ends the window is truncated.
[[nodiscard]] inline ScoredSequence smooth_scores(const ScoredSequence& scored, std::size_t window) {
  vatok::detail::require(window >= 1 && window % 2 == 1, "smoothing window must be a positive odd number");
  if (window == 1) {
    return scored;
  }
  ScoredSequence out = scored;
  const std::size_t half = window / 2;
  const std::size_t t_count = scored.scores.size();
  for (std::size_t t = 0; t < t_count; ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(t_count - 1, t + half);
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
      sum += scored.scores[i];
    }
    out.scores[t] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

struct TemporalInterval {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  double threshold = kDefaultThreshold;
  bool present = false;

  [[nodiscard]] std::optional<FrameSpan> span() const {
    return present ? std::optional<FrameSpan>(FrameSpan{start_frame, end_frame}) : std::nullopt;
  }
  friend bool operator==(const TemporalInterval&, const TemporalInterval&) = default;
};

inline void check_threshold(double threshold) {
  vatok::detail::require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
}

/// First and last frames scoring at least `threshold`; gaps between them are kept.
[[nodiscard]] inline TemporalInterval extract_interval(const ScoredSequence& scored, double threshold) {
  check_threshold(threshold);
  TemporalInterval interval;
  interval.threshold = threshold;
  for (std::size_t t = 0; t < scored.scores.size(); ++t) {
    if (scored.scores[t] >= threshold) {
      if (!interval.present) {
        interval.start_frame = t;
        interval.present = true;
      }
      interval.end_frame = t;
    }
  }
  return interval;
}

/// Extension: one interval per run of consecutive qualifying frames.
[[nodiscard]] inline std::vector<TemporalInterval> extract_islands(const ScoredSequence& scored, double threshold) {
  check_threshold(threshold);
  std::vector<TemporalInterval> islands;
  for (std::size_t t = 0; t < scored.scores.size(); ++t) {
    if (scored.scores[t] < threshold) {
      continue;
    }
    if (!islands.empty() && islands.back().end_frame + 1 == t) {
      islands.back().end_frame = t;
    } else {
      islands.push_back({t, t, threshold, true});
    }
  }
  return islands;
}

[[nodiscard]] inline nlohmann::json scores_to_json(const ScoredSequence& scored, double threshold) {
  return nlohmann::json{
      {"video_id", scored.video_id}, {"fps", scored.fps}, {"threshold", threshold}, {"scores", scored.scores}};
}

struct ScoresFile {
  ScoredSequence scored;
  double threshold = kDefaultThreshold;
};

inline void write_scores(const ScoredSequence& scored, double threshold, const std::filesystem::path& path) {
  check_threshold(threshold);
  vatok::detail::write_json_file(path, scores_to_json(scored, threshold));
}

[[nodiscard]] inline ScoresFile read_scores(const std::filesystem::path& path) {
  const auto j = vatok::detail::parse_json_file(path);
  ScoresFile file;
  try {
    j.at("video_id").get_to(file.scored.video_id);
    j.at("fps").get_to(file.scored.fps);
    j.at("threshold").get_to(file.threshold);
    j.at("scores").get_to(file.scored.scores);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' does not match the scores schema: " + e.what());
  }
  for (double s : file.scored.scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw FormatError("scores must lie in [0, 1]");
    }
  }
  return file;
}

// ---------------------------------------------------------------------------
// Prompt

enum class TimestampFormat { kFrames, kSeconds };

[[nodiscard]] inline TimestampFormat parse_timestamp_format(const std::string& name) {
  if (name == "frames") {
    return TimestampFormat::kFrames;
  }
  if (name == "seconds") {
    return TimestampFormat::kSeconds;
  }
  throw ValidationError("timestamp format must be 'frames' or 'seconds', got '" + name + "'");
}

[[nodiscard]] inline std::string to_string(TimestampFormat format) {
  return format == TimestampFormat::kFrames ? "frames" : "seconds";
}

/// The thirteen UCF-Crime anomaly classes.
[[nodiscard]] inline std::vector<std::string> default_categories() {
  return {"Abuse",   "Arrest",   "Arson",    "Assault",     "Burglary", "Explosion", "Fighting",
          "RoadAccidents", "Robbery", "Shooting", "Shoplifting", "Stealing", "Vandalism"};
}

struct TetPrompt {
  std::string text;
  std::vector<std::string> category_list;
  TimestampFormat timestamp_format = TimestampFormat::kFrames;
};

/// "frame 12", or "mm:ss" from floor(frame / fps).
[[nodiscard]] inline std::string render_timestamp(std::size_t frame, double fps, TimestampFormat format) {
  if (format == TimestampFormat::kFrames) {
    return "frame " + std::to_string(frame);
  }
  vatok::detail::require(std::isfinite(fps) && fps > 0.0, "seconds timestamps need a positive fps");
  // The small epsilon keeps exact multiples such as 150 / 30 from flooring down.
  const auto seconds = static_cast<std::uint64_t>(std::floor(static_cast<double>(frame) / fps + 1e-9));
  const std::uint64_t minutes = seconds / 60;
  const std::uint64_t rest = seconds % 60;
  std::ostringstream out;
  out << (minutes < 10 ? "0" : "") << minutes << ':' << (rest < 10 ? "0" : "") << rest;
  return out.str();
}

[[nodiscard]] inline TetPrompt render_tet(const TemporalInterval& interval, double fps,
                                          const std::vector<std::string>& categories, TimestampFormat format) {
  if (!interval.present) {
    throw ValidationError("no anomaly interval to render");
  }
  vatok::detail::require(!categories.empty(), "category list must not be empty");
  std::string text = "Known common crime types are: ";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (i != 0) {
      text += ',';
    }
    text += '\'';
    text += categories[i];
    text += '\'';
  }
  text += ". There is one of the crime types occurring from ";
  text += render_timestamp(interval.start_frame, fps, format);
  text += " to ";
  text += render_timestamp(interval.end_frame, fps, format);
  text += '.';
  return {std::move(text), categories, format};
}

inline void write_prompt(const TetPrompt& prompt, const std::filesystem::path& path) {
  io::write_file(path, prompt.text + "\n");
}

}  // namespace vatok::tetg
