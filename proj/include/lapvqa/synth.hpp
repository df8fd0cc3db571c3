// Copyright 2026 The lapvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LAPVQA_SYNTH_HPP
#define LAPVQA_SYNTH_HPP

#include "lapvqa/image.hpp"
#include "lapvqa/io.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lapvqa {

enum class DistortionKind { Noise, DefocusBlur, MotionBlur, UnevenIllumination, Smoke };

inline constexpr std::array<DistortionKind, 5> kAllKinds = {
    DistortionKind::Noise, DistortionKind::DefocusBlur, DistortionKind::MotionBlur,
    DistortionKind::UnevenIllumination, DistortionKind::Smoke};

inline constexpr int kLevelCount = 4;

std::string_view to_string(DistortionKind kind);
std::optional<DistortionKind> parse_kind(std::string_view name);
/// Short lowercase tag used in video ids (noise, defocus, motion, illumination, smoke).
std::string_view short_name(DistortionKind kind);

/// Scene content categories of the reference videos.
enum class ContentCategory { BL, GB, MI, IR, CL, SA, CU, SF, OE, BU };

inline constexpr std::array<ContentCategory, 10> kAllCategories = {
    ContentCategory::BL, ContentCategory::GB, ContentCategory::MI, ContentCategory::IR,
    ContentCategory::CL, ContentCategory::SA, ContentCategory::CU, ContentCategory::SF,
    ContentCategory::OE, ContentCategory::BU};

std::string_view to_string(ContentCategory c);
std::optional<ContentCategory> parse_category(std::string_view code);

struct NoiseParams {
  double variance = 0.0;  // on intensities scaled to [0, 1]
  bool operator==(const NoiseParams&) const = default;
};

struct DefocusParams {
  double sigma = 1.0;
  int ksize = 7;
  bool operator==(const DefocusParams&) const = default;
};

struct MotionParams {
  double length = 1.0;
  double angle_deg = 0.0;
  bool operator==(const MotionParams&) const = default;
};

/// Geometry is relative: radius and falloff are fractions of min(width, height),
/// the center is a fraction of (width, height).
struct IlluminationParams {
  double radius_frac = 0.45;
  double floor = 0.35;
  double falloff_frac = 0.25;
  double center_x_frac = 1.0 / 3.0;
  double center_y_frac = 1.0 / 3.0;
  bool operator==(const IlluminationParams&) const = default;
};

struct SmokeParams {
  double opacity = 0.0;
  bool operator==(const SmokeParams&) const = default;
};

using DistortionParams =
    std::variant<NoiseParams, DefocusParams, MotionParams, IlluminationParams, SmokeParams>;

DistortionKind kind_of(const DistortionParams& params);

struct DistortionSpec {
  DistortionKind kind = DistortionKind::Noise;
  int level = 1;
  DistortionParams params;
  bool operator==(const DistortionSpec&) const = default;
};

/// Throws std::invalid_argument when a parameter is outside its valid range.
void validate(const DistortionParams& params);

class IncompleteLevelTable : public std::runtime_error {
public:
  IncompleteLevelTable(DistortionKind kind, int level);
  DistortionKind kind() const { return kind_; }
  int level() const { return level_; }

private:
  DistortionKind kind_;
  int level_;
};

/// Parameters for every (kind, level) cell.
class LevelTable {
public:
  static LevelTable defaults();

  void set(DistortionKind kind, int level, DistortionParams params);
  /// Throws IncompleteLevelTable for a missing cell.
  const DistortionParams& at(DistortionKind kind, int level) const;
  bool contains(DistortionKind kind, int level) const;
  /// Throws IncompleteLevelTable on the first missing cell, std::invalid_argument
  /// for out-of-range or kind-mismatched parameters.
  void validate_complete() const;

  DistortionSpec spec(DistortionKind kind, int level) const { return {kind, level, at(kind, level)}; }

private:
  std::map<std::pair<DistortionKind, int>, DistortionParams> cells_;
};

struct IlluminationMask {
  int width = 0;
  int height = 0;
  Plane<double> gain;  // rows = height
};

// Distortion operators. All preserve dimensions and frame count.

VideoClip apply_defocus_blur(const VideoClip& clip, double sigma, int ksize);

/// Normalized anti-aliased line kernel; weight = max(0, 1 - distance to segment).
Plane<double> motion_kernel(double length, double angle_deg);
VideoClip apply_motion_blur(const VideoClip& clip, double length, double angle_deg);

VideoClip apply_awgn(const VideoClip& clip, double variance, std::uint64_t seed);

IlluminationMask make_illumination_mask(int width, int height, Eigen::Vector2d center, double radius,
                                        double falloff, double floor);
IlluminationMask make_illumination_mask(int width, int height, const IlluminationParams& params);
VideoClip apply_uneven_illumination(const VideoClip& clip, const IlluminationMask& mask);

/// Screen blend; the smoke clip is looped or truncated to the clip length.
VideoClip apply_smoke(const VideoClip& clip, const VideoClip& smoke, double opacity);

/// Grayscale animated fractal smoke on a black background.
VideoClip gen_smoke_clip(int width, int height, int nframes, std::uint64_t seed, FrameRate fps = {});

/// Dispatches on the spec; `seed` drives noise samples or the smoke clip.
VideoClip apply_distortion(const VideoClip& reference, const DistortionSpec& spec, std::uint64_t seed);

struct ReferenceVideo {
  std::string label;
  ContentCategory category = ContentCategory::BL;
  std::function<VideoClip()> load;

  static ReferenceVideo in_memory(std::string label, ContentCategory category, VideoClip clip);
  static ReferenceVideo from_file(std::string label, ContentCategory category,
                                  std::filesystem::path path);
};

struct ManifestEntry {
  std::string id;
  std::string reference_label;
  ContentCategory category = ContentCategory::BL;
  DistortionSpec spec;
  std::uint64_t seed = 0;
  std::string path;  // relative to the manifest's directory
  bool operator==(const ManifestEntry&) const = default;
};

using Manifest = std::vector<ManifestEntry>;

inline constexpr std::string_view kManifestFileName = "manifest.json";

std::string video_id(std::string_view reference_label, DistortionKind kind, int level);

/// Seed recorded for one distorted video. All smoke levels of a reference share
/// one smoke clip, so the smoke seed ignores the level.
std::uint64_t distortion_seed(std::uint64_t master_seed, std::size_t reference_index,
                              DistortionKind kind, int level);

/// Manifest entries only; no pixels touched.
Manifest plan_corpus(std::span<const ReferenceVideo> references, const LevelTable& levels,
                     std::uint64_t seed, ClipFormat format = ClipFormat::Y4m);

using CorpusProgress = std::function<void(const ManifestEntry&, std::size_t done, std::size_t total)>;

/// Writes |references| x 20 distorted clips and `manifest.json` into `out_dir`.
Manifest synthesize_corpus(std::span<const ReferenceVideo> references, const LevelTable& levels,
                           std::uint64_t seed, const std::filesystem::path& out_dir,
                           ClipFormat format = ClipFormat::Y4m, const CorpusProgress& progress = {});

}  // namespace lapvqa

#endif  // LAPVQA_SYNTH_HPP
