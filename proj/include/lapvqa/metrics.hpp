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

#ifndef LAPVQA_METRICS_HPP
#define LAPVQA_METRICS_HPP

#include "lapvqa/image.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace lapvqa {

enum class Metric { PSNR, SSIM, VIF };

inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::PSNR, Metric::SSIM, Metric::VIF};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

/// PSNR of identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE) over all RGB samples.
double psnr(const Frame& ref, const Frame& dist);

/// Mean SSIM map, 11x11 Gaussian window (sigma 1.5), C1 = (0.01 L)^2, C2 = (0.03 L)^2.
template <typename Scalar>
Scalar ssim(const Plane<Scalar>& ref, const Plane<Scalar>& dist);

/// Pixel-domain multi-scale VIF over 4 scales with an 11x11 Gaussian window
/// and stabilizing noise variance 2. Not symmetric: `ref` must be the reference.
template <typename Scalar>
Scalar vif(const Plane<Scalar>& ref, const Plane<Scalar>& dist);

extern template float ssim<float>(const Plane<float>&, const Plane<float>&);
extern template double ssim<double>(const Plane<double>&, const Plane<double>&);
extern template float vif<float>(const Plane<float>&, const Plane<float>&);
extern template double vif<double>(const Plane<double>&, const Plane<double>&);

struct MetricScore {
  Metric metric = Metric::PSNR;
  std::vector<double> per_frame;
  double video_score = 0.0;  // arithmetic mean of per_frame

  bool identical() const { return video_score == kPsnrIdentical; }
};

double frame_score(Metric metric, const Frame& ref, const Frame& dist);

/// Pairs frames by index; clips must have equal length and dimensions.
MetricScore score_clip(Metric metric, const VideoClip& ref, const VideoClip& dist);

}  // namespace lapvqa

#endif  // LAPVQA_METRICS_HPP
