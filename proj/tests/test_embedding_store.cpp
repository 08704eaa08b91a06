#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"
#include "vatok/embedding_store.hpp"

using testing_support::TempDir;
using namespace vatok;

namespace {

FrameSequence tiny_sequence() {
  FrameSequence seq;
  seq.video_id = "tiny";
  seq.fps = 1.0F;
  seq.frames.push_back({Matrix<float>(1, 1, 0.0F), {0.0F}});
  return seq;
}

SyntheticSpec planted_spec() {
  SyntheticSpec spec;
  spec.frames = 100;
  spec.patches = 8;
  spec.channels = 16;
  spec.anomaly = FrameSpan{40, 59};
  spec.anomaly_region = {0, 1, 2};
  spec.mean_shift = 2.0;
  spec.noise_scale = 1.0;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST(Vaeb, MinimalFileIsHeaderPlusOneFrame) {
  const std::string bytes = encode_vaeb(tiny_sequence());
  EXPECT_EQ(bytes.size(), 24u + 8u);
  EXPECT_EQ(bytes.substr(0, 4), "VAEB");
}

TEST(Vaeb, HeaderFieldsAreLittleEndian) {
  std::mt19937_64 rng(3);
  auto seq = testing_support::random_sequence(rng, 2, 4, 3);
  seq.fps = 30.0F;
  const std::string bytes = encode_vaeb(seq);
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  EXPECT_EQ(byte(4), 1);   // version
  EXPECT_EQ(byte(8), 2);   // T
  EXPECT_EQ(byte(12), 4);  // N
  EXPECT_EQ(byte(16), 3);  // C
  // 30.0f = 0x41F00000
  EXPECT_EQ(byte(20), 0x00);
  EXPECT_EQ(byte(22), 0xF0);
  EXPECT_EQ(byte(23), 0x41);
}

TEST(Vaeb, PayloadLengthMatchesLayout) {
  std::mt19937_64 rng(5);
  const auto seq = testing_support::random_sequence(rng, 2, 4, 3);
  const std::string bytes = encode_vaeb(seq);
  EXPECT_EQ(bytes.size() - kVaebHeaderBytes, 120u);  // 2 * (3 + 12) * 4
}

TEST(Vaeb, PayloadOrderIsClassThenPatchMajor) {
  FrameSequence seq;
  seq.fps = 2.0F;
  FrameEmbedding frame{Matrix<float>(2, 2, std::vector<float>{1.0F, 2.0F, 3.0F, 4.0F}), {9.0F, 8.0F}};
  seq.frames.push_back(frame);
  const std::string bytes = encode_vaeb(seq);
  const float expected[] = {9.0F, 8.0F, 1.0F, 2.0F, 3.0F, 4.0F};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(detail::get_f32(bytes, kVaebHeaderBytes + 4 * i), expected[i]) << i;
  }
}

TEST(Vaeb, RoundTripIsExactForRandomSequences) {
  TempDir dir("roundtrip");
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(1, 7);
  for (int trial = 0; trial < 25; ++trial) {
    auto seq = testing_support::random_sequence(rng, dim(rng), dim(rng), dim(rng));
    seq.video_id = "clip" + std::to_string(trial);
    const auto path = dir.file(seq.video_id + ".vaeb");
    write_sequence(seq, path);
    const auto back = read_sequence(path);
    ASSERT_EQ(back, seq) << "trial " << trial;
  }
}

TEST(Vaeb, WriteIsByteDeterministic) {
  std::mt19937_64 rng(23);
  const auto seq = testing_support::random_sequence(rng, 3, 5, 4);
  EXPECT_EQ(encode_vaeb(seq), encode_vaeb(seq));
}

TEST(Vaeb, RejectsInvalidSequenceBeforeWriting) {
  TempDir dir("invalid");
  auto seq = tiny_sequence();
  seq.frames[0].patches(0, 0) = std::numeric_limits<float>::quiet_NaN();
  const auto path = dir.file("bad.vaeb");
  EXPECT_THROW(write_sequence(seq, path), ValidationError);
  EXPECT_FALSE(std::filesystem::exists(path));

  FrameSequence empty;
  EXPECT_THROW(write_sequence(empty, path), ValidationError);

  auto ragged = tiny_sequence();
  ragged.frames.push_back({Matrix<float>(2, 1), {0.0F}});
  EXPECT_THROW(write_sequence(ragged, path), ValidationError);

  auto no_fps = tiny_sequence();
  no_fps.fps = 0.0F;
  EXPECT_THROW(write_sequence(no_fps, path), ValidationError);
}

TEST(Vaeb, BadMagicIsReportedDistinctly) {
  std::string bytes = encode_vaeb(tiny_sequence());
  bytes.replace(0, 4, "XXXX");
  EXPECT_THROW((void)decode_vaeb(bytes), BadMagicError);
}

TEST(Vaeb, UnsupportedVersionIsReportedDistinctly) {
  std::string bytes = encode_vaeb(tiny_sequence());
  bytes[4] = 2;
  EXPECT_THROW((void)decode_vaeb(bytes), UnsupportedVersionError);
}

TEST(Vaeb, TruncationNamesExpectedAndActualSize) {
  std::mt19937_64 rng(29);
  const auto seq = testing_support::random_sequence(rng, 3, 4, 2);
  const std::string bytes = encode_vaeb(seq);
  // Cut in the middle of frame 1.
  const std::string cut = bytes.substr(0, kVaebHeaderBytes + 40 + 12);
  try {
    (void)decode_vaeb(cut);
    FAIL() << "expected TruncatedError";
  } catch (const TruncatedError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(std::to_string(bytes.size())), std::string::npos) << what;
    EXPECT_NE(what.find(std::to_string(cut.size())), std::string::npos) << what;
  }
  EXPECT_THROW((void)decode_vaeb(bytes.substr(0, 10)), TruncatedError);
}

TEST(Vaeb, NonFiniteValuesAreReportedDistinctly) {
  std::string bytes = encode_vaeb(tiny_sequence());
  std::string nan;
  detail::put_f32(nan, std::numeric_limits<float>::infinity());
  bytes.replace(kVaebHeaderBytes + 4, 4, nan);
  EXPECT_THROW((void)decode_vaeb(bytes), NonFiniteError);
}

TEST(Vaeb, TrailingBytesAreRejected) {
  std::string bytes = encode_vaeb(tiny_sequence());
  bytes += "extra";
  EXPECT_THROW((void)decode_vaeb(bytes), FormatError);
}

TEST(Vaeb, MissingFileIsAnIoError) {
  EXPECT_THROW((void)read_sequence("/nonexistent/dir/x.vaeb"), IoError);
}

TEST(Manifest, JsonRoundTripAndConsistency) {
  TempDir dir("manifest");
  const auto video = generate_synthetic(planted_spec());
  const auto path = dir.file("m.labels.json");
  write_manifest(video.labels, path);
  const auto back = read_manifest(path);
  EXPECT_EQ(back, video.labels);
  EXPECT_EQ(back.labels_from_intervals(), back.frame_labels);

  const auto j = nlohmann::json::parse(io::read_file(path));
  EXPECT_EQ(j.size(), 5u);
  for (const char* key : {"video_id", "num_frames", "frame_labels", "intervals", "categories"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Manifest, InconsistentLabelsAreRejected) {
  LabelManifest m;
  m.video_id = "v";
  m.num_frames = 4;
  m.frame_labels = {0, 1, 0, 0};
  m.intervals = {{1, 2, "Arson"}};
  EXPECT_THROW(m.validate(), ValidationError);
  m.frame_labels = {0, 1, 1, 0};
  EXPECT_NO_THROW(m.validate());
  m.intervals = {{2, 4, "Arson"}};
  m.frame_labels = {0, 0, 1, 1};
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  const auto a = generate_synthetic(planted_spec());
  const auto b = generate_synthetic(planted_spec());
  EXPECT_EQ(a.sequence, b.sequence);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(encode_vaeb(a.sequence), encode_vaeb(b.sequence));
}

TEST(Synthetic, DifferentSeedsDiffer) {
  auto spec = planted_spec();
  const auto a = generate_synthetic(spec);
  spec.seed = 12;
  const auto b = generate_synthetic(spec);
  EXPECT_NE(a.sequence, b.sequence);
}

TEST(Synthetic, LabelsMatchPlantedInterval) {
  const auto video = generate_synthetic(planted_spec());
  ASSERT_EQ(video.labels.frame_labels.size(), 100u);
  for (std::size_t t = 0; t < 100; ++t) {
    EXPECT_EQ(video.labels.frame_labels[t], (t >= 40 && t <= 59) ? 1 : 0) << t;
  }
  ASSERT_EQ(video.labels.intervals.size(), 1u);
  EXPECT_EQ(video.labels.intervals[0].start_frame, 40u);
  EXPECT_EQ(video.labels.intervals[0].end_frame, 59u);
}

TEST(Synthetic, ShiftRaisesAnomalousClassNorm) {
  auto spec = planted_spec();
  spec.frames = 100;
  spec.seed = 7;
  const auto video = generate_synthetic(spec);
  double anomalous = 0.0;
  double normal = 0.0;
  for (std::size_t t = 0; t < spec.frames; ++t) {
    double sq = 0.0;
    for (float v : video.sequence.frames[t].class_embedding) sq += static_cast<double>(v) * v;
    (video.labels.frame_labels[t] == 1 ? anomalous : normal) += std::sqrt(sq);
  }
  anomalous /= 20.0;
  normal /= 80.0;
  EXPECT_GT(anomalous, normal);
}

TEST(Synthetic, ShiftOnlyTouchesRegionPatches) {
  auto spec = planted_spec();
  spec.noise_scale = 1e-3;
  spec.mean_shift = 5.0;
  const auto video = generate_synthetic(spec);
  const auto& before = video.sequence.frames[39].patches;
  const auto& inside = video.sequence.frames[40].patches;
  for (std::size_t p = 0; p < spec.patches; ++p) {
    const double delta = static_cast<double>(inside(p, 0)) - before(p, 0);
    if (p <= 2) {
      EXPECT_NEAR(delta, 5.0, 0.05) << p;
    } else {
      EXPECT_NEAR(delta, 0.0, 0.05) << p;
    }
  }
}

TEST(Synthetic, ZeroShiftKeepsDistributionsAligned) {
  auto spec = planted_spec();
  spec.frames = 400;
  spec.anomaly = FrameSpan{100, 299};
  spec.mean_shift = 0.0;
  const auto video = generate_synthetic(spec);
  // Labels still mark the span.
  EXPECT_EQ(video.labels.frame_labels[150], 1);
  double in_mean = 0.0;
  double out_mean = 0.0;
  for (std::size_t t = 0; t < spec.frames; ++t) {
    double s = 0.0;
    for (float v : video.sequence.frames[t].class_embedding) s += v;
    (video.labels.frame_labels[t] == 1 ? in_mean : out_mean) += s / 16.0;
  }
  in_mean /= 200.0;
  out_mean /= 200.0;
  // Per-frame mean of 16 unit-variance coords has sd 0.25; averaged over 200 frames, sd 0.018.
  EXPECT_NEAR(in_mean, out_mean, 0.1);
}

TEST(Synthetic, InvalidSpecIsRejected) {
  auto spec = planted_spec();
  spec.anomaly_region = {8};
  EXPECT_THROW((void)generate_synthetic(spec), ValidationError);
  spec = planted_spec();
  spec.anomaly = FrameSpan{60, 40};
  EXPECT_THROW((void)generate_synthetic(spec), ValidationError);
  spec = planted_spec();
  spec.anomaly = FrameSpan{90, 100};
  EXPECT_THROW((void)generate_synthetic(spec), ValidationError);
  spec = planted_spec();
  spec.noise_scale = 0.0;
  EXPECT_THROW((void)generate_synthetic(spec), ValidationError);
  spec = planted_spec();
  spec.mean_shift = -1.0;
  EXPECT_THROW((void)generate_synthetic(spec), ValidationError);
}
