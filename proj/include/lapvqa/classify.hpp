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

#ifndef LAPVQA_CLASSIFY_HPP
#define LAPVQA_CLASSIFY_HPP

#include "lapvqa/image.hpp"
#include "lapvqa/synth.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace lapvqa {

/// Floor for the radial spectrum difference of a flat image.
inline constexpr double kPbiEpsilon = 1e-12;

/// LMR of a plane with zero luminance range; large enough to never read as
/// uneven illumination.
inline constexpr double kLmrDegenerate = 1e9;

struct ClassifierThresholds {
  double pbi_blur = 0.0;              // PBI below this reads as blur
  double pbi_motion_vs_defocus = 0.0; // anisotropy above this reads as motion
  double smoke_tc = 0.35;             // saturation cut for the smoke histogram
  double noise_sigma = 0.0;           // estimated sigma above this reads as noise
  double lmr = 0.0;                   // LMR below this reads as uneven illumination
  int pbi_bins = 32;
  int saturation_bins = 256;

  /// Calibrated against the default synthetic corpus.
  static ClassifierThresholds defaults();
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Perceptual blur index: log of the mean absolute difference between the
/// radial spectral energy of the image and of its [1 2 1]/4 binomial-filtered
/// version over `w_bins` frequency annuli. DC is excluded.
double pbi(const LumaPlane& luma, int w_bins);

struct SmokeProbability {
  double p_smoke = 0.0;
  double p_nosmoke = 1.0;
};

/// Fraction of pixels whose saturation bin center lies at or below `tc`.
SmokeProbability smoke_probability(const Frame& frame, double tc, int nbins = 256);

/// Fast noise standard deviation estimate from the 3x3 Laplacian-difference
/// mask [[1,-2,1],[-2,4,-2],[1,-2,1]] over interior pixels.
double noise_sigma(const LumaPlane& luma);

/// Luminance mean over luminance range; kLmrDegenerate for flat planes.
double lmr(const LumaPlane& luma);

/// Directional blur score: sharpness measured by re-blurring along 0, 45, 90
/// and 135 degrees, then the larger of the two orthogonal-pair ratios
/// (sharper over blurrier). Near 1 for isotropic blur or none.
double blur_anisotropy(const LumaPlane& luma);

struct FrameIndices {
  double pbi = 0.0;
  double p_smoke = 0.0;
  double p_nosmoke = 1.0;
  double sigma_n = 0.0;
  double lmr = 0.0;
  double anisotropy = 1.0;
};

FrameIndices frame_indices(const Frame& frame, const ClassifierThresholds& thresholds);

/// Fixed-priority decision: noise, smoke, uneven illumination, blur.
std::optional<DistortionKind> decide(const FrameIndices& indices, const ClassifierThresholds& thresholds);

struct ClassificationReport {
  std::vector<FrameIndices> per_frame;
  FrameIndices video;  // per-index median over frames
  std::optional<DistortionKind> decision;
};

ClassificationReport classify_video(const VideoClip& clip, const ClassifierThresholds& thresholds);

/// Rows: ground-truth kind. Columns: decided kind, last column = None.
struct AccuracySummary {
  std::array<std::array<int, 6>, 5> confusion{};
  std::array<int, 5> totals{};

  void add(DistortionKind truth, std::optional<DistortionKind> decision);
  /// Per-kind video-level accuracy in [0, 1]; NaN when the kind has no videos.
  double accuracy(DistortionKind kind) const;
};

}  // namespace lapvqa

#endif  // LAPVQA_CLASSIFY_HPP
