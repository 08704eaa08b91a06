#pragma once

/// Embedding streams on disk and in memory.
///
/// A FrameSequence holds, per frame, an N x C block of patch embeddings and a
/// C-dim class embedding. Files use the little-endian VAEB v1 layout:
///
///   0..3   "VAEB"
///   4..7   u32 version (= 1)
///   8..11  u32 T (frames)
///   12..15 u32 N (patches per frame)
///   16..19 u32 C (channels)
///   20..23 f32 fps
///   then per frame: C x f32 class embedding, N*C x f32 patch embeddings
///   (patch-major, channel-minor).
///
/// Values are held as f32 in memory so that a read after a write reproduces
/// every float bit-for-bit. Arithmetic on them elsewhere is done in f64.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vatok/error.hpp"
#include "vatok/io.hpp"
#include "vatok/matrix.hpp"
#include "vatok/random.hpp"

namespace vatok {

inline constexpr char kVaebMagic[4] = {'V', 'A', 'E', 'B'};
inline constexpr std::uint32_t kVaebVersion = 1;
inline constexpr std::size_t kVaebHeaderBytes = 24;

/// Inclusive frame span [start, end].
struct FrameSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  [[nodiscard]] std::size_t length() const { return end - start + 1; }
  [[nodiscard]] bool contains(std::size_t t) const { return t >= start && t <= end; }
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

struct FrameEmbedding {
  Matrix<float> patches;  // N x C
  std::vector<float> class_embedding;  // C

  friend bool operator==(const FrameEmbedding&, const FrameEmbedding&) = default;
};

struct FrameSequence {
  std::string video_id;
  float fps = 1.0F;
  std::vector<FrameEmbedding> frames;

  [[nodiscard]] std::size_t num_frames() const { return frames.size(); }
  [[nodiscard]] std::size_t num_patches() const { return frames.empty() ? 0 : frames.front().patches.rows(); }
  [[nodiscard]] std::size_t channels() const { return frames.empty() ? 0 : frames.front().patches.cols(); }

  /// Throws ValidationError unless T >= 1, fps > 0, shapes agree, and every value is finite.
  void validate() const {
    detail::require(!frames.empty(), "sequence must contain at least one frame");
    detail::require(std::isfinite(fps) && fps > 0.0F, "fps must be positive and finite");
    const std::size_t n = num_patches();
    const std::size_t c = channels();
    detail::require(n >= 1 && c >= 1, "patch count and channel count must be positive");
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto& frame = frames[t];
      if (frame.patches.rows() != n || frame.patches.cols() != c || frame.class_embedding.size() != c) {
        throw ValidationError("frame " + std::to_string(t) + " shape differs from frame 0");
      }
      const auto finite = [](float v) { return std::isfinite(v); };
      if (!std::ranges::all_of(frame.patches.values(), finite) ||
          !std::ranges::all_of(frame.class_embedding, finite)) {
        throw ValidationError("frame " + std::to_string(t) + " contains NaN or Inf");
      }
    }
  }

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;
};

// ---------------------------------------------------------------------------
// VAEB encoding

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xFFU));
  }
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline std::uint32_t get_u32(const std::string& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

inline float get_f32(const std::string& in, std::size_t offset) { return std::bit_cast<float>(get_u32(in, offset)); }

}  // namespace detail

/// Byte count of a VAEB v1 file for the given dimensions.
[[nodiscard]] inline std::uint64_t vaeb_file_size(std::uint64_t t, std::uint64_t n, std::uint64_t c) {
  return kVaebHeaderBytes + t * (c + n * c) * 4;
}

[[nodiscard]] inline std::string encode_vaeb(const FrameSequence& seq) {
  seq.validate();
  const std::size_t n = seq.num_patches();
  const std::size_t c = seq.channels();
  detail::require(seq.num_frames() <= UINT32_MAX && n <= UINT32_MAX && c <= UINT32_MAX,
                  "sequence dimensions exceed the u32 header fields");
  std::string out;
  out.reserve(vaeb_file_size(seq.num_frames(), n, c));
  out.append(kVaebMagic, 4);
  detail::put_u32(out, kVaebVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(seq.num_frames()));
  detail::put_u32(out, static_cast<std::uint32_t>(n));
  detail::put_u32(out, static_cast<std::uint32_t>(c));
  detail::put_f32(out, seq.fps);
  for (const auto& frame : seq.frames) {
    for (float v : frame.class_embedding) {
      detail::put_f32(out, v);
    }
    for (float v : frame.patches.values()) {
      detail::put_f32(out, v);
    }
  }
  return out;
}

/// Parses VAEB bytes. Each failure mode has its own exception type.
[[nodiscard]] inline FrameSequence decode_vaeb(const std::string& bytes, std::string video_id = {}) {
  if (bytes.size() < kVaebHeaderBytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kVaebMagic, 4) != 0) {
      throw BadMagicError("bad magic: expected \"VAEB\"");
    }
    throw TruncatedError("truncated header: expected " + std::to_string(kVaebHeaderBytes) + " bytes, got " +
                         std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kVaebMagic, 4) != 0) {
    throw BadMagicError("bad magic: expected \"VAEB\", got \"" + bytes.substr(0, 4) + "\"");
  }
  const std::uint32_t version = detail::get_u32(bytes, 4);
  if (version != kVaebVersion) {
    throw UnsupportedVersionError("unsupported VAEB version " + std::to_string(version));
  }
  const std::uint32_t t = detail::get_u32(bytes, 8);
  const std::uint32_t n = detail::get_u32(bytes, 12);
  const std::uint32_t c = detail::get_u32(bytes, 16);
  const float fps = detail::get_f32(bytes, 20);
  if (t == 0 || n == 0 || c == 0) {
    throw FormatError("header declares an empty dimension (T=" + std::to_string(t) + ", N=" + std::to_string(n) +
                      ", C=" + std::to_string(c) + ")");
  }
  if (!std::isfinite(fps) || fps <= 0.0F) {
    throw FormatError("header fps must be positive and finite");
  }
  const std::uint64_t expected = vaeb_file_size(t, n, c);
  if (bytes.size() < expected) {
    throw TruncatedError("truncated payload: expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw FormatError("trailing data: expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
  }

  FrameSequence seq;
  seq.video_id = std::move(video_id);
  seq.fps = fps;
  seq.frames.reserve(t);
  std::size_t offset = kVaebHeaderBytes;
  for (std::uint32_t f = 0; f < t; ++f) {
    FrameEmbedding frame{Matrix<float>(n, c), std::vector<float>(c)};
    for (auto& v : frame.class_embedding) {
      v = detail::get_f32(bytes, offset);
      offset += 4;
    }
    for (auto& v : frame.patches.values()) {
      v = detail::get_f32(bytes, offset);
      offset += 4;
    }
    const auto finite = [](float v) { return std::isfinite(v); };
    if (!std::ranges::all_of(frame.class_embedding, finite) || !std::ranges::all_of(frame.patches.values(), finite)) {
      throw NonFiniteError("frame " + std::to_string(f) + " contains NaN or Inf");
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

/// Writes `seq` as VAEB v1. Validation happens before the file is opened.
inline void write_sequence(const FrameSequence& seq, const std::filesystem::path& path) {
  const std::string bytes = encode_vaeb(seq);
  io::write_file(path, bytes);
}

/// Reads a VAEB v1 file; the video id is taken from the file stem.
[[nodiscard]] inline FrameSequence read_sequence(const std::filesystem::path& path) {
  return decode_vaeb(io::read_file(path), path.stem().string());
}

// ---------------------------------------------------------------------------
// Label manifest

struct LabeledInterval {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // inclusive
  std::string category;

  friend bool operator==(const LabeledInterval&, const LabeledInterval&) = default;
};

struct LabelManifest {
  std::string video_id;
  std::size_t num_frames = 0;
  std::vector<int> frame_labels;
  std::vector<LabeledInterval> intervals;
  std::vector<std::string> categories;

  /// Frame labels implied by `intervals`.
  [[nodiscard]] std::vector<int> labels_from_intervals() const {
    std::vector<int> labels(num_frames, 0);
    for (const auto& iv : intervals) {
      for (std::size_t t = iv.start_frame; t <= iv.end_frame && t < num_frames; ++t) {
        labels[t] = 1;
      }
    }
    return labels;
  }

  /// Smallest span enclosing every labeled interval, if any.
  [[nodiscard]] std::optional<FrameSpan> enclosing_span() const {
    if (intervals.empty()) {
      return std::nullopt;
    }
    FrameSpan span{intervals.front().start_frame, intervals.front().end_frame};
    for (const auto& iv : intervals) {
      span.start = std::min(span.start, iv.start_frame);
      span.end = std::max(span.end, iv.end_frame);
    }
    return span;
  }

  void validate() const {
    detail::require(frame_labels.size() == num_frames, "frame_labels length must equal num_frames");
    for (int label : frame_labels) {
      detail::require(label == 0 || label == 1, "frame labels must be 0 or 1");
    }
    for (const auto& iv : intervals) {
      detail::require(iv.start_frame <= iv.end_frame && iv.end_frame < num_frames,
                      "interval [" + std::to_string(iv.start_frame) + ", " + std::to_string(iv.end_frame) +
                          "] out of range for " + std::to_string(num_frames) + " frames");
    }
    detail::require(labels_from_intervals() == frame_labels, "frame_labels disagree with intervals");
  }

  friend bool operator==(const LabelManifest&, const LabelManifest&) = default;
};

inline void to_json(nlohmann::json& j, const LabeledInterval& iv) {
  j = nlohmann::json{{"start_frame", iv.start_frame}, {"end_frame", iv.end_frame}, {"category", iv.category}};
}

inline void from_json(const nlohmann::json& j, LabeledInterval& iv) {
  j.at("start_frame").get_to(iv.start_frame);
  j.at("end_frame").get_to(iv.end_frame);
  j.at("category").get_to(iv.category);
}

inline void to_json(nlohmann::json& j, const LabelManifest& m) {
  j = nlohmann::json{{"video_id", m.video_id},     {"num_frames", m.num_frames}, {"frame_labels", m.frame_labels},
                     {"intervals", m.intervals}, {"categories", m.categories}};
}

inline void from_json(const nlohmann::json& j, LabelManifest& m) {
  j.at("video_id").get_to(m.video_id);
  j.at("num_frames").get_to(m.num_frames);
  j.at("frame_labels").get_to(m.frame_labels);
  j.at("intervals").get_to(m.intervals);
  j.at("categories").get_to(m.categories);
}

namespace detail {

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  io::write_file(path, j.dump(2) + "\n");
}

template <typename T>
T json_as(const nlohmann::json& j, const std::filesystem::path& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' does not match the expected schema: " + e.what());
  }
}

}  // namespace detail

inline void write_manifest(const LabelManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  detail::write_json_file(path, nlohmann::json(manifest));
}

[[nodiscard]] inline LabelManifest read_manifest(const std::filesystem::path& path) {
  auto manifest = detail::json_as<LabelManifest>(detail::parse_json_file(path), path);
  manifest.validate();
  return manifest;
}

// ---------------------------------------------------------------------------
// Synthetic sequences

struct SyntheticSpec {
  std::size_t frames = 1;    // T
  std::size_t patches = 1;   // N
  std::size_t channels = 1;  // C
  std::optional<FrameSpan> anomaly;
  std::vector<std::size_t> anomaly_region;  // patch indices shifted inside the anomaly
  double mean_shift = 0.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 42;
  float fps = 30.0F;
  std::string video_id = "synthetic";
  std::string category = "Anomaly";

  void validate() const {
    detail::require(frames >= 1 && patches >= 1 && channels >= 1, "T, N and C must be positive");
    detail::require(std::isfinite(mean_shift) && mean_shift >= 0.0, "mean_shift must be >= 0");
    detail::require(std::isfinite(noise_scale) && noise_scale > 0.0, "noise_scale must be > 0");
    detail::require(std::isfinite(fps) && fps > 0.0F, "fps must be positive");
    for (std::size_t p : anomaly_region) {
      detail::require(p < patches, "anomaly_region index " + std::to_string(p) + " outside [0, N)");
    }
    if (anomaly) {
      detail::require(anomaly->start <= anomaly->end && anomaly->end < frames, "anomaly span outside [0, T)");
    }
  }
};

/// Seed for the shared base embedding. Every synthetic sequence with the same
/// N and C fluctuates around the same base, so a classifier trained on one
/// seed transfers to another.
inline constexpr std::uint64_t kSyntheticBaseSeed = 0x5EED'BA5EULL;

struct SyntheticVideo {
  FrameSequence sequence;
  LabelManifest labels;
};

/// Normal frames are base + noise_scale * N(0, 1) per coordinate. Frames inside
/// the anomaly span add mean_shift to every class coordinate and to the patch
/// rows listed in anomaly_region.
[[nodiscard]] inline SyntheticVideo generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.patches;
  const std::size_t c = spec.channels;

  Rng base_rng(kSyntheticBaseSeed);
  std::vector<double> base_class(c);
  for (auto& v : base_class) {
    v = base_rng.normal();
  }
  std::vector<double> base_patches(n * c);
  for (auto& v : base_patches) {
    v = base_rng.normal();
  }

  std::vector<bool> in_region(n, false);
  for (std::size_t p : spec.anomaly_region) {
    in_region[p] = true;
  }

  Rng rng(spec.seed);
  SyntheticVideo out;
  out.sequence.video_id = spec.video_id;
  out.sequence.fps = spec.fps;
  out.sequence.frames.reserve(spec.frames);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const bool anomalous = spec.anomaly && spec.anomaly->contains(t);
    const double shift = anomalous ? spec.mean_shift : 0.0;
    FrameEmbedding frame{Matrix<float>(n, c), std::vector<float>(c)};
    for (std::size_t k = 0; k < c; ++k) {
      frame.class_embedding[k] = static_cast<float>(base_class[k] + spec.noise_scale * rng.normal() + shift);
    }
    for (std::size_t p = 0; p < n; ++p) {
      const double patch_shift = in_region[p] ? shift : 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        frame.patches(p, k) = static_cast<float>(base_patches[p * c + k] + spec.noise_scale * rng.normal() + patch_shift);
      }
    }
    out.sequence.frames.push_back(std::move(frame));
  }

  auto& labels = out.labels;
  labels.video_id = spec.video_id;
  labels.num_frames = spec.frames;
  labels.categories = {spec.category};
  if (spec.anomaly) {
    labels.intervals.push_back({spec.anomaly->start, spec.anomaly->end, spec.category});
  }
  labels.frame_labels = labels.labels_from_intervals();
  return out;
}

}  // namespace vatok
