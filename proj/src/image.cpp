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

#include "lapvqa/image.hpp"

#include <algorithm>
#include <string>

namespace lapvqa {

namespace {

void check_dims(int width, int height) {
  if (width < kMinFrameSide || height < kMinFrameSide) {
    throw std::invalid_argument("frame must be at least 3x3, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

}  // namespace

Frame::Frame(int width, int height)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw std::invalid_argument("frame pixel buffer does not match width*height*3");
  }
}

void Frame::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = r;
    pixels_[i + 1] = g;
    pixels_[i + 2] = b;
  }
}

VideoClip::VideoClip(std::vector<Frame> frames, FrameRate fps)
    : frames_(std::move(frames)), fps_(fps) {
  if (frames_.empty()) throw std::invalid_argument("video clip needs at least one frame");
  if (fps_.num <= 0 || fps_.den <= 0) throw std::invalid_argument("frame rate must be positive");
  const int w = frames_.front().width();
  const int h = frames_.front().height();
  for (const auto& f : frames_) {
    if (f.width() != w || f.height() != h) {
      throw std::invalid_argument("all frames of a clip must share dimensions");
    }
  }
}

Plane<double> saturation(const Frame& frame) {
  Plane<double> s(frame.height(), frame.width());
  const auto px = frame.pixels();
  const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  for (std::size_t i = 0; i < n; ++i) {
    const int r = px[3 * i], g = px[3 * i + 1], b = px[3 * i + 2];
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    s.data()[i] = mx == 0 ? 0.0 : static_cast<double>(mx - mn) / mx;
  }
  return s;
}

VideoClip with_frames(const VideoClip& like, std::vector<Frame> frames) {
  return VideoClip(std::move(frames), like.fps());
}

}  // namespace lapvqa
