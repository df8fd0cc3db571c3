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

#ifndef LAPVQA_IMAGE_HPP
#define LAPVQA_IMAGE_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lapvqa {

/// Dense single-channel image, rows = height, cols = width.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real-valued luminance in [0, 255].
using LumaPlane = Plane<double>;

template <typename Scalar>
using RgbPlanes = std::array<Plane<Scalar>, 3>;

/// Smallest frame the 3x3 noise mask fits into.
inline constexpr int kMinFrameSide = 3;

/// Packed 8-bit RGB frame, row-major, channel-interleaved.
class Frame {
public:
  Frame() = default;
  Frame(int width, int height);
  Frame(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t sample_count() const { return pixels_.size(); }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::uint8_t at(int x, int y, int c) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b);

  bool operator==(const Frame&) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Exact rational frame rate, kept rational so Y4M headers round-trip.
struct FrameRate {
  int num = 25;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate&) const = default;
};

class VideoClip {
public:
  VideoClip() = default;
  VideoClip(std::vector<Frame> frames, FrameRate fps = {});

  const std::vector<Frame>& frames() const { return frames_; }
  const Frame& frame(std::size_t i) const { return frames_[i]; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  FrameRate fps() const { return fps_; }
  int width() const { return frames_.empty() ? 0 : frames_.front().width(); }
  int height() const { return frames_.empty() ? 0 : frames_.front().height(); }

  bool operator==(const VideoClip&) const = default;

private:
  std::vector<Frame> frames_;
  FrameRate fps_;
};

/// BT.601 full-range luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

template <typename Scalar = double>
Plane<Scalar> to_luma(const Frame& frame) {
  Plane<Scalar> y(frame.height(), frame.width());
  const auto px = frame.pixels();
  Scalar* out = y.data();
  const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<Scalar>(kLumaR * px[3 * i] + kLumaG * px[3 * i + 1] +
                                 kLumaB * px[3 * i + 2]);
  }
  return y;
}

template <typename Scalar = double>
RgbPlanes<Scalar> split_channels(const Frame& frame) {
  RgbPlanes<Scalar> planes;
  for (auto& p : planes) p.resize(frame.height(), frame.width());
  const auto px = frame.pixels();
  const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  for (std::size_t i = 0; i < n; ++i) {
    planes[0].data()[i] = px[3 * i];
    planes[1].data()[i] = px[3 * i + 1];
    planes[2].data()[i] = px[3 * i + 2];
  }
  return planes;
}

/// Round half up and clamp to the 8-bit range.
template <typename Scalar>
inline std::uint8_t quantize(Scalar v) {
  const Scalar r = std::floor(v + Scalar(0.5));
  if (!(r > Scalar(0))) return 0;
  if (r >= Scalar(255)) return 255;
  return static_cast<std::uint8_t>(r);
}

template <typename Scalar>
Frame merge_channels(const RgbPlanes<Scalar>& planes) {
  const int h = static_cast<int>(planes[0].rows());
  const int w = static_cast<int>(planes[0].cols());
  for (const auto& p : planes) {
    if (p.rows() != h || p.cols() != w) {
      throw std::invalid_argument("merge_channels: channel dimensions differ");
    }
  }
  Frame frame(w, h);
  auto px = frame.pixels();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < n; ++i) {
    px[3 * i] = quantize(planes[0].data()[i]);
    px[3 * i + 1] = quantize(planes[1].data()[i]);
    px[3 * i + 2] = quantize(planes[2].data()[i]);
  }
  return frame;
}

/// HSV saturation, (max - min) / max, 0 for black pixels.
Plane<double> saturation(const Frame& frame);

/// Replace the frames of a clip while keeping its frame rate.
VideoClip with_frames(const VideoClip& like, std::vector<Frame> frames);

}  // namespace lapvqa

#endif  // LAPVQA_IMAGE_HPP
