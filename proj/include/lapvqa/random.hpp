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

#ifndef LAPVQA_RANDOM_HPP
#define LAPVQA_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lapvqa {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic substream seed from a master seed and a path of indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// Lattice hash in [0, 1).
inline double lattice_hash(std::int64_t x, std::int64_t y, std::uint64_t seed) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL +
                                   static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4FULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Smoothstep-interpolated 2-D value noise in [0, 1).
inline double value_noise(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = x - fx, ty = y - fy;
  const double sx = tx * tx * (3.0 - 2.0 * tx);
  const double sy = ty * ty * (3.0 - 2.0 * ty);
  const double a = lattice_hash(ix, iy, seed), b = lattice_hash(ix + 1, iy, seed);
  const double c = lattice_hash(ix, iy + 1, seed), d = lattice_hash(ix + 1, iy + 1, seed);
  const double top = a + (b - a) * sx;
  const double bottom = c + (d - c) * sx;
  return top + (bottom - top) * sy;
}

/// Multi-octave value noise normalized to [0, 1).
inline double fractal_noise(double x, double y, int octaves, std::uint64_t seed,
                            double gain = 0.5, double lacunarity = 2.0) {
  double sum = 0.0, amp = 1.0, norm = 0.0;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * value_noise(x, y, seed + static_cast<std::uint64_t>(o) * 0x51ED27ULL);
    norm += amp;
    amp *= gain;
    x *= lacunarity;
    y *= lacunarity;
  }
  return sum / norm;
}

}  // namespace lapvqa

#endif  // LAPVQA_RANDOM_HPP
