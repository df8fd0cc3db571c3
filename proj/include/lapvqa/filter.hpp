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

#ifndef LAPVQA_FILTER_HPP
#define LAPVQA_FILTER_HPP

#include "lapvqa/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

// Linear filtering on Plane<Scalar>. Every filter here uses replicate
// borders and returns an image of the input's size.

namespace lapvqa {

template <typename Scalar>
using Kernel1d = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Normalized sampled Gaussian of odd length `ksize`.
template <typename Scalar>
Kernel1d<Scalar> gaussian_kernel_1d(Scalar sigma, int ksize) {
  if (ksize < 1 || ksize % 2 == 0) throw std::invalid_argument("gaussian kernel size must be odd");
  if (!(sigma > Scalar(0))) throw std::invalid_argument("gaussian sigma must be positive");
  const int r = ksize / 2;
  Kernel1d<Scalar> k(ksize);
  for (int i = 0; i < ksize; ++i) {
    const Scalar d = static_cast<Scalar>(i - r);
    k(i) = std::exp(-d * d / (Scalar(2) * sigma * sigma));
  }
  return k / k.sum();
}

/// Outer product of two 1-D Gaussians; sums to one.
template <typename Scalar>
Plane<Scalar> gaussian_kernel_2d(Scalar sigma, int ksize) {
  const Kernel1d<Scalar> g = gaussian_kernel_1d(sigma, ksize);
  return (g.matrix() * g.matrix().transpose()).array();
}

/// [1, 2, 1] / 4.
template <typename Scalar>
Kernel1d<Scalar> binomial_kernel_3() {
  Kernel1d<Scalar> k(3);
  k << Scalar(0.25), Scalar(0.5), Scalar(0.25);
  return k;
}

template <typename Scalar>
Plane<Scalar> pad_replicate(const Plane<Scalar>& src, int pad_rows, int pad_cols) {
  const Eigen::Index h = src.rows(), w = src.cols();
  Plane<Scalar> out(h + 2 * pad_rows, w + 2 * pad_cols);
  for (Eigen::Index y = 0; y < out.rows(); ++y) {
    const Eigen::Index sy = std::clamp<Eigen::Index>(y - pad_rows, 0, h - 1);
    out.row(y).segment(pad_cols, w) = src.row(sy);
    for (int x = 0; x < pad_cols; ++x) {
      out(y, x) = src(sy, 0);
      out(y, pad_cols + w + x) = src(sy, w - 1);
    }
  }
  return out;
}

/// Separable convolution: `kx` along rows (x), then `ky` along columns (y).
template <typename Scalar>
Plane<Scalar> convolve_separable(const Plane<Scalar>& src, const Kernel1d<Scalar>& kx,
                                 const Kernel1d<Scalar>& ky) {
  if (kx.size() % 2 == 0 || ky.size() % 2 == 0) {
    throw std::invalid_argument("convolution kernels must have odd length");
  }
  const Eigen::Index h = src.rows(), w = src.cols();
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);

  Plane<Scalar> tmp = Plane<Scalar>::Zero(h, w);
  {
    const Plane<Scalar> padded = pad_replicate(src, 0, rx);
    for (Eigen::Index i = 0; i < kx.size(); ++i) {
      if (kx(i) == Scalar(0)) continue;
      tmp += kx(i) * padded.middleCols(2 * rx - i, w);
    }
  }
  Plane<Scalar> out = Plane<Scalar>::Zero(h, w);
  const Plane<Scalar> padded = pad_replicate(tmp, ry, 0);
  for (Eigen::Index i = 0; i < ky.size(); ++i) {
    if (ky(i) == Scalar(0)) continue;
    out += ky(i) * padded.middleRows(2 * ry - i, h);
  }
  return out;
}

template <typename Scalar>
Plane<Scalar> convolve_separable(const Plane<Scalar>& src, const Kernel1d<Scalar>& k) {
  return convolve_separable(src, k, k);
}

/// Full 2-D convolution with an odd-sized kernel; zero taps are skipped.
template <typename Scalar>
Plane<Scalar> convolve_2d(const Plane<Scalar>& src, const Plane<Scalar>& kernel) {
  if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0) {
    throw std::invalid_argument("2-D kernel must have odd dimensions");
  }
  const Eigen::Index h = src.rows(), w = src.cols();
  const int ry = static_cast<int>(kernel.rows() / 2);
  const int rx = static_cast<int>(kernel.cols() / 2);
  const Plane<Scalar> padded = pad_replicate(src, ry, rx);
  Plane<Scalar> out = Plane<Scalar>::Zero(h, w);
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      const Scalar k = kernel(i, j);
      if (k == Scalar(0)) continue;
      out += k * padded.block(2 * ry - i, 2 * rx - j, h, w);
    }
  }
  return out;
}

/// Keeps every second sample in each direction, starting at (0, 0).
template <typename Scalar>
Plane<Scalar> decimate_2(const Plane<Scalar>& src) {
  const Eigen::Index h = (src.rows() + 1) / 2, w = (src.cols() + 1) / 2;
  Plane<Scalar> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) out(y, x) = src(2 * y, 2 * x);
  }
  return out;
}

}  // namespace lapvqa

#endif  // LAPVQA_FILTER_HPP
