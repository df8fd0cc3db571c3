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

#include "lapvqa/classify.hpp"

#include "lapvqa/filter.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace lapvqa {

namespace {

using ComplexPlane = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// |F|^2 / N^2, so the spectrum sums to the mean square of the input.
Plane<double> power_spectrum(const Plane<double>& img) {
  const Eigen::Index h = img.rows(), w = img.cols();
  Eigen::FFT<double> fft;
  ComplexPlane spec(h, w);
  std::vector<double> row(static_cast<std::size_t>(w));
  std::vector<std::complex<double>> out;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) row[static_cast<std::size_t>(x)] = img(y, x);
    fft.fwd(out, row);
    for (Eigen::Index x = 0; x < w; ++x) spec(y, x) = out[static_cast<std::size_t>(x)];
  }
  std::vector<std::complex<double>> col(static_cast<std::size_t>(h));
  for (Eigen::Index x = 0; x < w; ++x) {
    for (Eigen::Index y = 0; y < h; ++y) col[static_cast<std::size_t>(y)] = spec(y, x);
    fft.fwd(out, col);
    for (Eigen::Index y = 0; y < h; ++y) spec(y, x) = out[static_cast<std::size_t>(y)];
  }
  const double n = static_cast<double>(h) * static_cast<double>(w);
  return spec.abs2() / (n * n);
}

/// Signed frequency in cycles per pixel for FFT index k of an n-point transform.
double frequency(Eigen::Index k, Eigen::Index n) {
  return static_cast<double>(k <= n / 2 ? k : k - n) / static_cast<double>(n);
}

Eigen::ArrayXd radial_energy(const Plane<double>& power, int bins) {
  const Eigen::Index h = power.rows(), w = power.cols();
  const double r_max = std::sqrt(0.5);
  Eigen::ArrayXd re = Eigen::ArrayXd::Zero(bins);
  for (Eigen::Index y = 0; y < h; ++y) {
    const double fy = frequency(y, h);
    for (Eigen::Index x = 0; x < w; ++x) {
      if (x == 0 && y == 0) continue;
      const double fx = frequency(x, w);
      const double r = std::sqrt(fx * fx + fy * fy);
      const int b = std::min(bins - 1, static_cast<int>(r / r_max * bins));
      re(b) += power(y, x);
    }
  }
  return re;
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lo + hi);
}

}  // namespace

ClassifierThresholds ClassifierThresholds::defaults() {
  ClassifierThresholds t;
  // Each value sits in the middle of the widest gap between the classes it
  // separates on the default corpus (10 references, every 25th frame).
  t.pbi_blur = -0.99;
  t.pbi_motion_vs_defocus = 1.235;
  t.smoke_tc = 0.35;
  t.noise_sigma = 3.3;
  t.lmr = 0.45;
  return t;
}

void ClassifierThresholds::validate() const {
  if (!(smoke_tc > 0.0 && smoke_tc < 1.0)) throw std::invalid_argument("smoke_tc must lie in (0, 1)");
  for (double v : {pbi_blur, pbi_motion_vs_defocus, noise_sigma, lmr}) {
    if (!std::isfinite(v)) throw std::invalid_argument("classifier thresholds must be finite");
  }
  if (!(lmr > 0.0)) throw std::invalid_argument("lmr threshold must be > 0");
  if (pbi_bins < 8) throw std::invalid_argument("pbi_bins must be >= 8");
  if (saturation_bins < 2) throw std::invalid_argument("saturation_bins must be >= 2");
}

double pbi(const LumaPlane& luma, int w_bins) {
  if (w_bins < 8) throw std::invalid_argument("pbi needs at least 8 radial bins");
  if (luma.rows() < 16 || luma.cols() < 16) throw std::invalid_argument("pbi needs at least 16x16 pixels");
  const Plane<double> centered = luma - luma.mean();
  const Plane<double> filtered = convolve_separable(centered, binomial_kernel_3<double>());
  const Eigen::ArrayXd re = radial_energy(power_spectrum(centered), w_bins);
  const Eigen::ArrayXd re_f = radial_energy(power_spectrum(filtered), w_bins);
  const double diff = (re - re_f).abs().sum() / w_bins;
  return std::log(std::max(diff, kPbiEpsilon));
}

SmokeProbability smoke_probability(const Frame& frame, double tc, int nbins) {
  if (nbins < 1) throw std::invalid_argument("saturation histogram needs at least one bin");
  const Plane<double> sat = saturation(frame);
  std::vector<std::size_t> hist(static_cast<std::size_t>(nbins), 0);
  for (Eigen::Index i = 0; i < sat.size(); ++i) {
    const int b = std::min(nbins - 1, static_cast<int>(sat.data()[i] * nbins));
    ++hist[static_cast<std::size_t>(b)];
  }
  std::size_t low = 0;
  for (int b = 0; b < nbins; ++b) {
    if ((b + 0.5) / nbins <= tc) low += hist[static_cast<std::size_t>(b)];
  }
  SmokeProbability p;
  p.p_smoke = static_cast<double>(low) / static_cast<double>(sat.size());
  p.p_nosmoke = 1.0 - p.p_smoke;
  return p;
}

double noise_sigma(const LumaPlane& luma) {
  const Eigen::Index h = luma.rows(), w = luma.cols();
  if (h < 3 || w < 3) throw std::invalid_argument("noise estimate needs at least 3x3 pixels");
  double sum = 0.0;
  for (Eigen::Index y = 1; y + 1 < h; ++y) {
    for (Eigen::Index x = 1; x + 1 < w; ++x) {
      const double v = luma(y - 1, x - 1) - 2.0 * luma(y - 1, x) + luma(y - 1, x + 1) -
                       2.0 * luma(y, x - 1) + 4.0 * luma(y, x) - 2.0 * luma(y, x + 1) +
                       luma(y + 1, x - 1) - 2.0 * luma(y + 1, x) + luma(y + 1, x + 1);
      sum += std::abs(v);
    }
  }
  return std::sqrt(M_PI / 2.0) * sum / (6.0 * static_cast<double>(w - 2) * static_cast<double>(h - 2));
}

double lmr(const LumaPlane& luma) {
  const double range = luma.maxCoeff() - luma.minCoeff();
  if (!(range > 0.0)) return kLmrDegenerate;
  return luma.mean() / range;
}

double blur_anisotropy(const LumaPlane& luma) {
  const int h = static_cast<int>(luma.rows()), w = static_cast<int>(luma.cols());
  if (h < 16 || w < 16) throw std::invalid_argument("anisotropy needs at least 16x16 pixels");

  // Sharpness along a direction: the share of absolute neighbour differences
  // that a 9-tap box re-blur along that same direction removes. An image that
  // is already smeared along d loses little.
  constexpr int kHalf = 4;
  constexpr int kMargin = kHalf + 2;
  constexpr int kDirs[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  std::array<double, 4> sharpness{};
  Plane<double> blurred(h, w);
  for (std::size_t k = 0; k < 4; ++k) {
    const int dx = kDirs[k][0], dy = kDirs[k][1];
    blurred.setZero();
    for (int y = kMargin - 1; y < h - kMargin + 1; ++y) {
      for (int x = kMargin - 1; x < w - kMargin + 1; ++x) {
        double acc = 0.0;
        for (int t = -kHalf; t <= kHalf; ++t) acc += luma(y + t * dy, x + t * dx);
        blurred(y, x) = acc / (2 * kHalf + 1);
      }
    }
    double removed = 0.0, total = 0.0;
    for (int y = kMargin; y < h - kMargin; ++y) {
      for (int x = kMargin; x < w - kMargin; ++x) {
        const double d_in = std::abs(luma(y, x) - luma(y - dy, x - dx));
        const double d_bl = std::abs(blurred(y, x) - blurred(y - dy, x - dx));
        removed += std::max(0.0, d_in - d_bl);
        total += d_in;
      }
    }
    sharpness[k] = total > 0.0 ? removed / total : 0.0;
  }

  // Orthogonal pairs only: axis and diagonal steps differ in length, so
  // comparing across them would read as anisotropy on isotropic blur.
  auto ratio = [&](std::size_t a, std::size_t b) {
    const double hi = std::max(sharpness[a], sharpness[b]);
    const double lo = std::min(sharpness[a], sharpness[b]);
    if (!(hi > 0.0)) return 1.0;
    return hi / std::max(lo, hi * 1e-12);
  };
  return std::max(ratio(0, 2), ratio(1, 3));
}

FrameIndices frame_indices(const Frame& frame, const ClassifierThresholds& t) {
  const LumaPlane luma = to_luma(frame);
  FrameIndices fi;
  fi.pbi = pbi(luma, t.pbi_bins);
  const SmokeProbability sp = smoke_probability(frame, t.smoke_tc, t.saturation_bins);
  fi.p_smoke = sp.p_smoke;
  fi.p_nosmoke = sp.p_nosmoke;
  fi.sigma_n = noise_sigma(luma);
  fi.lmr = lmr(luma);
  fi.anisotropy = blur_anisotropy(luma);
  return fi;
}

std::optional<DistortionKind> decide(const FrameIndices& v, const ClassifierThresholds& t) {
  if (v.sigma_n > t.noise_sigma) return DistortionKind::Noise;
  if (v.p_smoke > 0.5) return DistortionKind::Smoke;
  if (v.lmr < t.lmr) return DistortionKind::UnevenIllumination;
  if (v.pbi < t.pbi_blur) {
    return v.anisotropy > t.pbi_motion_vs_defocus ? DistortionKind::MotionBlur : DistortionKind::DefocusBlur;
  }
  return std::nullopt;
}

ClassificationReport classify_video(const VideoClip& clip, const ClassifierThresholds& t) {
  if (clip.empty()) throw std::invalid_argument("cannot classify an empty clip");
  t.validate();
  ClassificationReport report;
  report.per_frame.reserve(clip.size());
  for (const auto& f : clip.frames()) report.per_frame.push_back(frame_indices(f, t));

  auto med = [&](double FrameIndices::*field) {
    std::vector<double> v;
    v.reserve(report.per_frame.size());
    for (const auto& fi : report.per_frame) v.push_back(fi.*field);
    return median(std::move(v));
  };
  report.video.pbi = med(&FrameIndices::pbi);
  report.video.p_smoke = med(&FrameIndices::p_smoke);
  report.video.p_nosmoke = 1.0 - report.video.p_smoke;
  report.video.sigma_n = med(&FrameIndices::sigma_n);
  report.video.lmr = med(&FrameIndices::lmr);
  report.video.anisotropy = med(&FrameIndices::anisotropy);
  report.decision = decide(report.video, t);
  return report;
}

void AccuracySummary::add(DistortionKind truth, std::optional<DistortionKind> decision) {
  const auto row = static_cast<std::size_t>(truth);
  const std::size_t col = decision ? static_cast<std::size_t>(*decision) : 5;
  ++confusion[row][col];
  ++totals[row];
}

double AccuracySummary::accuracy(DistortionKind kind) const {
  const auto k = static_cast<std::size_t>(kind);
  if (totals[k] == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(confusion[k][k]) / totals[k];
}

}  // namespace lapvqa
