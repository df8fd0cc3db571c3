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

#include "lapvqa/metrics.hpp"

#include "lapvqa/filter.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lapvqa {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::PSNR: return "PSNR";
    case Metric::SSIM: return "SSIM";
    case Metric::VIF: return "VIF";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double psnr(const Frame& ref, const Frame& dist) {
  if (ref.width() != dist.width() || ref.height() != dist.height()) {
    throw std::invalid_argument("psnr: frame dimensions differ");
  }
  const auto a = ref.pixels();
  const auto b = dist.pixels();
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrIdentical;
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

template <typename Scalar>
void check_pair(const Plane<Scalar>& ref, const Plane<Scalar>& dist, Eigen::Index min_side, const char* who) {
  if (ref.rows() != dist.rows() || ref.cols() != dist.cols()) {
    throw std::invalid_argument(std::string(who) + ": plane dimensions differ");
  }
  if (ref.rows() < min_side || ref.cols() < min_side) {
    throw std::invalid_argument(std::string(who) + ": planes smaller than " + std::to_string(min_side));
  }
}

constexpr int kWindow = 11;

}  // namespace

template <typename Scalar>
Scalar ssim(const Plane<Scalar>& ref, const Plane<Scalar>& dist) {
  check_pair(ref, dist, kWindow, "ssim");
  const Kernel1d<Scalar> g = gaussian_kernel_1d(Scalar(1.5), kWindow);
  const Scalar c1 = Scalar(0.01 * 255) * Scalar(0.01 * 255);
  const Scalar c2 = Scalar(0.03 * 255) * Scalar(0.03 * 255);

  const Plane<Scalar> mu_x = convolve_separable(ref, g);
  const Plane<Scalar> mu_y = convolve_separable(dist, g);
  const Plane<Scalar> xx = convolve_separable(Plane<Scalar>(ref * ref), g) - mu_x * mu_x;
  const Plane<Scalar> yy = convolve_separable(Plane<Scalar>(dist * dist), g) - mu_y * mu_y;
  const Plane<Scalar> xy = convolve_separable(Plane<Scalar>(ref * dist), g) - mu_x * mu_y;

  const Plane<Scalar> map = ((Scalar(2) * mu_x * mu_y + c1) * (Scalar(2) * xy + c2)) /
                            ((mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2));
  // Only positions where the window lies fully inside the image.
  const int r = kWindow / 2;
  return map.block(r, r, map.rows() - 2 * r, map.cols() - 2 * r).mean();
}

template <typename Scalar>
Scalar vif(const Plane<Scalar>& ref_in, const Plane<Scalar>& dist_in) {
  check_pair(ref_in, dist_in, 32, "vif");
  constexpr Scalar kNoiseVar = 2;
  constexpr Scalar kEps = Scalar(1e-10);
  constexpr int kScales = 4;
  const Kernel1d<Scalar> g = gaussian_kernel_1d(Scalar(kWindow) / Scalar(5), kWindow);

  Plane<Scalar> ref = ref_in;
  Plane<Scalar> dist = dist_in;
  double num = 0.0, den = 0.0;
  for (int scale = 0; scale < kScales; ++scale) {
    if (scale > 0) {
      ref = decimate_2(convolve_separable(ref, g));
      dist = decimate_2(convolve_separable(dist, g));
    }
    const Plane<Scalar> mu1 = convolve_separable(ref, g);
    const Plane<Scalar> mu2 = convolve_separable(dist, g);
    const Plane<Scalar> s1 = (convolve_separable(Plane<Scalar>(ref * ref), g) - mu1 * mu1).max(Scalar(0));
    const Plane<Scalar> s2 = (convolve_separable(Plane<Scalar>(dist * dist), g) - mu2 * mu2).max(Scalar(0));
    const Plane<Scalar> s12 = convolve_separable(Plane<Scalar>(ref * dist), g) - mu1 * mu2;

    for (Eigen::Index i = 0; i < s1.size(); ++i) {
      Scalar sigma1 = s1.data()[i];
      const Scalar sigma2 = s2.data()[i];
      const Scalar sigma12 = s12.data()[i];
      Scalar gain = sigma12 / (sigma1 + kEps);
      Scalar sv = sigma2 - gain * sigma12;
      if (sigma1 < kEps) {
        gain = 0;
        sv = sigma2;
        sigma1 = 0;
      }
      if (sigma2 < kEps) {
        gain = 0;
        sv = 0;
      }
      if (gain < 0) {
        sv = sigma2;
        gain = 0;
      }
      sv = std::max(sv, kEps);
      num += std::log10(1.0 + static_cast<double>(gain * gain * sigma1) / static_cast<double>(sv + kNoiseVar));
      den += std::log10(1.0 + static_cast<double>(sigma1) / static_cast<double>(kNoiseVar));
    }
  }
  if (den <= 0.0) return Scalar(1);  // flat reference at every scale
  return static_cast<Scalar>(num / den);
}

template float ssim<float>(const Plane<float>&, const Plane<float>&);
template double ssim<double>(const Plane<double>&, const Plane<double>&);
template float vif<float>(const Plane<float>&, const Plane<float>&);
template double vif<double>(const Plane<double>&, const Plane<double>&);

double frame_score(Metric metric, const Frame& ref, const Frame& dist) {
  switch (metric) {
    case Metric::PSNR: return psnr(ref, dist);
    case Metric::SSIM: return ssim(to_luma<double>(ref), to_luma<double>(dist));
    case Metric::VIF: return vif(to_luma<double>(ref), to_luma<double>(dist));
  }
  throw std::invalid_argument("unknown metric");
}

MetricScore score_clip(Metric metric, const VideoClip& ref, const VideoClip& dist) {
  if (ref.empty() || ref.size() != dist.size()) {
    throw std::invalid_argument("score_clip: clips must be non-empty and of equal length");
  }
  if (ref.width() != dist.width() || ref.height() != dist.height()) {
    throw std::invalid_argument("score_clip: clip dimensions differ");
  }
  MetricScore score;
  score.metric = metric;
  score.per_frame.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) score.per_frame.push_back(frame_score(metric, ref.frame(i), dist.frame(i)));
  score.video_score = std::accumulate(score.per_frame.begin(), score.per_frame.end(), 0.0) /
                      static_cast<double>(score.per_frame.size());
  return score;
}

}  // namespace lapvqa
