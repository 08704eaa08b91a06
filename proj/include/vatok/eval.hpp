#pragma once

/// Desk-scale evaluation: frame-level ROC AUC, temporal IoU of the predicted
/// anomaly span, token-budget statistics, and the K-ratio ablation.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vatok/embedding_store.hpp"
#include "vatok/error.hpp"
#include "vatok/sets.hpp"
#include "vatok/tetg.hpp"

namespace vatok::eval {

inline constexpr int kReportVersion = 1;

inline constexpr const char* kReportNote =
    "frame_auc and temporal_iou are classifier-level proxies for temporal localization; "
    "question-answering accuracy of a downstream language model is not measured here";

/// ROC AUC by the rank statistic; tied scores share their average rank.
[[nodiscard]] inline double frame_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("frame_auc: " + std::to_string(scores.size()) + " scores vs " +
                          std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      const int label = labels[order[k]];
      detail::require(label == 0 || label == 1, "labels must be 0 or 1");
      if (label == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("frame_auc is undefined unless both classes are present");
  }
  const auto p = static_cast<double>(positives);
  const auto n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

[[nodiscard]] inline double frame_auc(const tetg::ScoredSequence& scored, const LabelManifest& labels) {
  return frame_auc(scored.scores, labels.frame_labels);
}

/// IoU of inclusive frame sets. Absent/absent is 1; one side absent is 0.
[[nodiscard]] inline double temporal_iou(std::optional<FrameSpan> pred, std::optional<FrameSpan> gt) {
  if (!pred && !gt) {
    return 1.0;
  }
  if (!pred || !gt) {
    return 0.0;
  }
  detail::require(pred->start <= pred->end && gt->start <= gt->end, "interval start must not exceed end");
  const std::size_t lo = std::max(pred->start, gt->start);
  const std::size_t hi = std::min(pred->end, gt->end);
  const std::size_t inter = hi >= lo ? hi - lo + 1 : 0;
  const std::size_t uni = pred->length() + gt->length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

[[nodiscard]] inline double temporal_iou(const tetg::TemporalInterval& pred, std::optional<FrameSpan> gt) {
  return temporal_iou(pred.span(), gt);
}

struct TokenStats {
  double mean_selected = 0.0;
  double compression_ratio = 0.0;
};

[[nodiscard]] inline TokenStats token_stats(std::span<const std::size_t> selected_counts, std::size_t num_patches) {
  detail::require(!selected_counts.empty(), "token_stats needs at least one frame");
  detail::require(num_patches >= 1, "token_stats needs a positive patch count");
  const double total = std::accumulate(selected_counts.begin(), selected_counts.end(), 0.0);
  const double mean = total / static_cast<double>(selected_counts.size());
  return {mean, 1.0 - mean / static_cast<double>(num_patches)};
}

[[nodiscard]] inline TokenStats token_stats(const sets::SequenceSelection& selection) {
  return token_stats(selection.stats.selected_counts, selection.num_patches);
}

struct KResult {
  double k = 0.0;
  std::size_t budget = 0;  // max(1, round_half_up(k * N))
  double selected_per_frame = 0.0;
  double compression_ratio = 0.0;
  double iou = 0.0;
  double auc = 0.0;
  bool budget_ok = false;  // every frame kept exactly `budget` tokens
};

struct EvalReport {
  double frame_auc = 0.0;
  double temporal_iou = 0.0;
  double compression_ratio = 0.0;
  std::vector<KResult> per_k_results;
  nlohmann::json config = nlohmann::json::object();

  [[nodiscard]] bool budget_law_holds() const {
    return std::ranges::all_of(per_k_results, [](const KResult& r) { return r.budget_ok; });
  }
};

/// Runs selection, scoring, and interval extraction for each K (sorted
/// ascending, duplicates dropped). Scoring reads class embeddings only, so the
/// AUC column does not depend on K.
[[nodiscard]] inline std::vector<KResult> ablate_k(const FrameSequence& seq, const LabelManifest& labels,
                                                   const tetg::AnomalyModel& model, std::vector<double> k_list,
                                                   double threshold = tetg::kDefaultThreshold) {
  for (double k : k_list) {
    detail::require(k > 0.0 && k <= 1.0, "every K must lie in (0, 1], got " + std::to_string(k));
  }
  std::ranges::sort(k_list);
  k_list.erase(std::unique(k_list.begin(), k_list.end()), k_list.end());
  if (labels.num_frames != seq.num_frames()) {
    throw ValidationError("label manifest covers " + std::to_string(labels.num_frames) + " frames, sequence has " +
                          std::to_string(seq.num_frames()));
  }

  const auto scored = tetg::score_sequence(model, seq);
  const double auc = frame_auc(scored, labels);
  const double iou = temporal_iou(tetg::extract_interval(scored, threshold), labels.enclosing_span());

  std::vector<KResult> results;
  results.reserve(k_list.size());
  for (double k : k_list) {
    const auto selection = sets::process_sequence(seq, k);
    const auto stats = token_stats(selection);
    KResult row;
    row.k = k;
    row.budget = sets::selection_budget(k, seq.num_patches());
    row.selected_per_frame = stats.mean_selected;
    row.compression_ratio = stats.compression_ratio;
    row.iou = iou;
    row.auc = auc;
    row.budget_ok = std::ranges::all_of(selection.frames, [&](const sets::FrameSelection& f) {
      const auto ones = static_cast<std::size_t>(std::ranges::count(f.mask.bits, std::uint8_t{1}));
      return f.mask.selected_count == row.budget && ones == row.budget && f.tokens.size() == row.budget;
    });
    results.push_back(row);
  }
  return results;
}

inline void to_json(nlohmann::json& j, const KResult& r) {
  j = nlohmann::json{{"k", r.k},     {"budget", r.budget}, {"selected_per_frame", r.selected_per_frame},
                     {"compression_ratio", r.compression_ratio},
                     {"iou", r.iou}, {"auc", r.auc},       {"budget_ok", r.budget_ok}};
}

inline void from_json(const nlohmann::json& j, KResult& r) {
  j.at("k").get_to(r.k);
  j.at("budget").get_to(r.budget);
  j.at("selected_per_frame").get_to(r.selected_per_frame);
  j.at("compression_ratio").get_to(r.compression_ratio);
  j.at("iou").get_to(r.iou);
  j.at("auc").get_to(r.auc);
  j.at("budget_ok").get_to(r.budget_ok);
}

[[nodiscard]] inline nlohmann::json report_to_json(const EvalReport& report) {
  return nlohmann::json{{"version", kReportVersion},
                        {"note", kReportNote},
                        {"frame_auc", report.frame_auc},
                        {"temporal_iou", report.temporal_iou},
                        {"compression_ratio", report.compression_ratio},
                        {"budget_law_holds", report.budget_law_holds()},
                        {"per_k_results", report.per_k_results},
                        {"config", report.config}};
}

[[nodiscard]] inline EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport report;
    j.at("frame_auc").get_to(report.frame_auc);
    j.at("temporal_iou").get_to(report.temporal_iou);
    j.at("compression_ratio").get_to(report.compression_ratio);
    j.at("per_k_results").get_to(report.per_k_results);
    report.config = j.at("config");
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON does not match the expected schema: ") + e.what());
  }
}

/// Keys are emitted in sorted order, so equal reports serialize to equal bytes.
inline void write_report(const EvalReport& report, const std::filesystem::path& path) {
  detail::write_json_file(path, report_to_json(report));
}

[[nodiscard]] inline EvalReport read_report(const std::filesystem::path& path) {
  return report_from_json(detail::parse_json_file(path));
}

}  // namespace vatok::eval
