#pragma once

/// Spatial effective token selection.
///
/// Each frame is compared against the previous frame patch by patch (L1
/// distance over channels). The top K ratio of patches by distance are kept;
/// the kept patch embeddings are the frame's effective tokens. A frame is
/// summarized downstream by a mean-pooled content token and a query-attended
/// context token.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"
#include "vatok/embedding_store.hpp"
#include "vatok/error.hpp"
#include "vatok/io.hpp"
#include "vatok/matrix.hpp"

namespace vatok::sets {

inline constexpr double kDefaultKRatio = 0.5;

struct DifferenceMap {
  std::vector<double> values;  // one non-negative distance per patch
};

struct SelectionMask {
  std::vector<std::uint8_t> bits;
  double k_ratio = kDefaultKRatio;
  std::size_t selected_count = 0;

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
};

struct EffectiveToken {
  std::size_t patch_index = 0;
  std::vector<double> values;
};

/// Selected tokens in ascending patch order.
struct EffectiveTokenSet {
  std::vector<EffectiveToken> tokens;

  [[nodiscard]] bool empty() const { return tokens.empty(); }
  [[nodiscard]] std::size_t size() const { return tokens.size(); }
  [[nodiscard]] std::size_t dim() const { return tokens.empty() ? 0 : tokens.front().values.size(); }
};

struct FrameTokens {
  std::vector<double> content_token;
  std::vector<double> context_token;
};

/// Number of patches kept for ratio `k_ratio` out of `n`: max(1, round_half_up(k * n)).
[[nodiscard]] inline std::size_t selection_budget(double k_ratio, std::size_t n) {
  detail::require(k_ratio > 0.0 && k_ratio <= 1.0, "k_ratio must lie in (0, 1], got " + std::to_string(k_ratio));
  // The epsilon absorbs products such as 0.15 * 10 = 1.4999999999999998.
  const double product = k_ratio * static_cast<double>(n);
  const auto rounded = static_cast<std::size_t>(std::floor(product + 0.5 + 1e-9));
  return std::clamp<std::size_t>(rounded, 1, std::max<std::size_t>(n, 1));
}

/// Per-patch Manhattan distance between two N x C frames.
template <typename T, typename U>
[[nodiscard]] DifferenceMap difference_map(MatrixView<const T> current, MatrixView<const U> previous) {
  if (current.rows != previous.rows || current.cols != previous.cols) {
    throw ValidationError("difference_map shape mismatch: " + std::to_string(current.rows) + "x" +
                          std::to_string(current.cols) + " vs " + std::to_string(previous.rows) + "x" +
                          std::to_string(previous.cols));
  }
  DifferenceMap map{std::vector<double>(current.rows, 0.0)};
  for (std::size_t i = 0; i < current.rows; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < current.cols; ++c) {
      const double a = static_cast<double>(current(i, c));
      const double b = static_cast<double>(previous(i, c));
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw ValidationError("difference_map input contains NaN or Inf at patch " + std::to_string(i));
      }
      sum += std::abs(a - b);
    }
    map.values[i] = sum;
  }
  return map;
}

template <typename T>
[[nodiscard]] DifferenceMap difference_map(const Matrix<T>& current, const Matrix<T>& previous) {
  return difference_map(current.view(), previous.view());
}

/// Marks the `selection_budget(k_ratio, N)` largest distances. Equal distances
/// go to the lower patch index first.
[[nodiscard]] inline SelectionMask selection_mask(const DifferenceMap& d, double k_ratio) {
  const std::size_t n = d.values.size();
  detail::require(n >= 1, "selection_mask needs at least one patch");
  const std::size_t count = selection_budget(k_ratio, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    if (d.values[a] != d.values[b]) {
      return d.values[a] > d.values[b];
    }
    return a < b;
  };
  if (count < n) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), before);
  }

  SelectionMask mask{std::vector<std::uint8_t>(n, 0), k_ratio, count};
  for (std::size_t i = 0; i < count; ++i) {
    mask.bits[order[i]] = 1;
  }
  return mask;
}

/// Rows of `frame` whose mask bit is set, copied in ascending patch order.
template <typename T>
[[nodiscard]] EffectiveTokenSet select_tokens(MatrixView<const T> frame, const SelectionMask& mask) {
  if (mask.bits.size() != frame.rows) {
    throw ValidationError("mask length " + std::to_string(mask.bits.size()) + " does not match patch count " +
                          std::to_string(frame.rows));
  }
  EffectiveTokenSet set;
  set.tokens.reserve(mask.selected_count);
  for (std::size_t i = 0; i < frame.rows; ++i) {
    if (mask.bits[i] != 0) {
      const auto row = frame.row(i);
      set.tokens.push_back({i, std::vector<double>(row.begin(), row.end())});
    }
  }
  return set;
}

template <typename T>
[[nodiscard]] EffectiveTokenSet select_tokens(const Matrix<T>& frame, const SelectionMask& mask) {
  return select_tokens(frame.view(), mask);
}

/// Coordinate-wise mean of the tokens.
[[nodiscard]] inline std::vector<double> content_token(const EffectiveTokenSet& set) {
  detail::require(!set.empty(), "content_token of an empty token set");
  std::vector<double> mean(set.dim(), 0.0);
  for (const auto& token : set.tokens) {
    for (std::size_t c = 0; c < mean.size(); ++c) {
      mean[c] += token.values[c];
    }
  }
  const auto count = static_cast<double>(set.size());
  for (auto& v : mean) {
    v /= count;
  }
  return mean;
}

/// Softmax weights over tokens for logits query . token / sqrt(C).
[[nodiscard]] inline std::vector<double> attention_weights(const EffectiveTokenSet& set, std::span<const double> query) {
  detail::require(!set.empty(), "attention over an empty token set");
  const std::size_t dim = set.dim();
  if (query.size() != dim) {
    throw ValidationError("query dimension " + std::to_string(query.size()) + " does not match token dimension " +
                          std::to_string(dim));
  }
  detail::require(std::ranges::all_of(query, [](double v) { return std::isfinite(v); }), "query must be finite");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> weights(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      dot += query[c] * set.tokens[i].values[c];
    }
    weights[i] = dot * scale;
  }
  const double peak = *std::ranges::max_element(weights);
  double total = 0.0;
  for (auto& w : weights) {
    w = std::exp(w - peak);
    total += w;
  }
  for (auto& w : weights) {
    w /= total;
  }
  return weights;
}

/// Attention-pooled token for a text query.
[[nodiscard]] inline std::vector<double> context_token(const EffectiveTokenSet& set, std::span<const double> query) {
  const auto weights = attention_weights(set, query);
  std::vector<double> out(set.dim(), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] += weights[i] * set.tokens[i].values[c];
    }
  }
  return out;
}

struct FrameSelection {
  DifferenceMap difference;
  SelectionMask mask;
  EffectiveTokenSet tokens;
  FrameTokens frame_tokens;
};

struct SelectionStats {
  std::vector<std::size_t> selected_counts;
  std::size_t num_patches = 0;
  double mean_selected = 0.0;
  double compression_ratio = 0.0;  // 1 - mean_selected / N
};

struct SequenceSelection {
  std::string video_id;
  double k_ratio = kDefaultKRatio;
  std::size_t num_patches = 0;
  std::size_t channels = 0;
  std::vector<FrameSelection> frames;
  SelectionStats stats;
};

/// Runs selection over every frame. Frame t is differenced against frame t-1;
/// frame 0 against itself, which gives a zero map and the low-index mask.
/// `text_query` feeds the context token; an empty query means all zeros.
[[nodiscard]] inline SequenceSelection process_sequence(const FrameSequence& seq, double k_ratio,
                                                        std::span<const double> text_query = {}) {
  seq.validate();
  const std::size_t n = seq.num_patches();
  const std::size_t c = seq.channels();
  (void)selection_budget(k_ratio, n);  // validates k_ratio up front
  std::vector<double> zero_query;
  if (text_query.empty()) {
    zero_query.assign(c, 0.0);
    text_query = zero_query;
  }

  SequenceSelection out;
  out.video_id = seq.video_id;
  out.k_ratio = k_ratio;
  out.num_patches = n;
  out.channels = c;
  out.frames.reserve(seq.num_frames());
  for (std::size_t t = 0; t < seq.num_frames(); ++t) {
    const auto& current = seq.frames[t].patches;
    const auto& previous = seq.frames[t == 0 ? 0 : t - 1].patches;
    FrameSelection frame;
    frame.difference = difference_map(current, previous);
    frame.mask = selection_mask(frame.difference, k_ratio);
    frame.tokens = select_tokens(current, frame.mask);
    frame.frame_tokens.content_token = content_token(frame.tokens);
    frame.frame_tokens.context_token = context_token(frame.tokens, text_query);
    out.stats.selected_counts.push_back(frame.mask.selected_count);
    out.frames.push_back(std::move(frame));
  }
  out.stats.num_patches = n;
  const double total = std::accumulate(out.stats.selected_counts.begin(), out.stats.selected_counts.end(), 0.0);
  out.stats.mean_selected = total / static_cast<double>(out.stats.selected_counts.size());
  out.stats.compression_ratio = 1.0 - out.stats.mean_selected / static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Output files

[[nodiscard]] inline nlohmann::json selection_to_json(const SequenceSelection& sel, const nlohmann::json& config = {}) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t t = 0; t < sel.frames.size(); ++t) {
    std::vector<std::size_t> indices;
    indices.reserve(sel.frames[t].tokens.size());
    for (const auto& token : sel.frames[t].tokens.tokens) {
      indices.push_back(token.patch_index);
    }
    frames.push_back({{"frame", t}, {"selected_count", sel.frames[t].mask.selected_count}, {"indices", indices}});
  }
  nlohmann::json j{{"video_id", sel.video_id},
                   {"k_ratio", sel.k_ratio},
                   {"num_patches", sel.num_patches},
                   {"num_frames", sel.frames.size()},
                   {"frames", frames},
                   {"mean_selected", sel.stats.mean_selected},
                   {"compression_ratio", sel.stats.compression_ratio}};
  if (!config.is_null()) {
    j["config"] = config;
  }
  return j;
}

inline void write_selection(const SequenceSelection& sel, const std::filesystem::path& path,
                            const nlohmann::json& config = {}) {
  detail::write_json_file(path, selection_to_json(sel, config));
}

/// Selected token values, frame by frame, each token as C little-endian f32 in
/// ascending patch order. Counts per frame come from the selection JSON.
[[nodiscard]] inline std::string encode_token_sidecar(const SequenceSelection& sel) {
  std::string out;
  for (const auto& frame : sel.frames) {
    for (const auto& token : frame.tokens.tokens) {
      for (double v : token.values) {
        detail::put_f32(out, static_cast<float>(v));
      }
    }
  }
  return out;
}

inline void write_token_sidecar(const SequenceSelection& sel, const std::filesystem::path& path) {
  io::write_file(path, encode_token_sidecar(sel));
}

}  // namespace vatok::sets
