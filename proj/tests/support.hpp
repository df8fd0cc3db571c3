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

#ifndef LAPVQA_TESTS_SUPPORT_HPP
#define LAPVQA_TESTS_SUPPORT_HPP

#include "lapvqa/image.hpp"
#include "lapvqa/random.hpp"
#include "lapvqa/synth.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace lapvqa::test {

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("lapvqa-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
  std::filesystem::path path_;
};

inline Frame uniform_frame(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(w, h);
  f.fill(r, g, b);
  return f;
}

// Deterministic colourful texture with both fine and coarse structure.
inline Frame textured_frame(int w, int h, std::uint64_t seed) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double coarse = fractal_noise(x / 24.0, y / 24.0, 4, seed);
      const double fine = lattice_hash(x, y, seed + 99);
      const double v = 0.75 * coarse + 0.25 * fine;
      f.at(x, y, 0) = quantize(40.0 + 200.0 * v);
      f.at(x, y, 1) = quantize(20.0 + 150.0 * (1.0 - v));
      f.at(x, y, 2) = quantize(30.0 + 120.0 * fine);
    }
  }
  return f;
}

inline VideoClip textured_clip(int w, int h, int n, std::uint64_t seed) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(textured_frame(w, h, seed + static_cast<std::uint64_t>(i)));
  return VideoClip(std::move(frames));
}

inline LumaPlane gaussian_noise_plane(int w, int h, double mean, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(mean, sigma);
  LumaPlane p(h, w);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = n(rng);
  return p;
}

// In-memory manifest with every (reference, kind, level) cell; no files.
inline Manifest make_manifest(int n_refs, std::vector<DistortionKind> kinds = {kAllKinds.begin(), kAllKinds.end()}) {
  Manifest m;
  const LevelTable t = LevelTable::defaults();
  for (int r = 0; r < n_refs; ++r) {
    const ContentCategory cat = kAllCategories[static_cast<std::size_t>(r) % kAllCategories.size()];
    const std::string label = std::string(to_string(cat)) + (r < 10 ? "0" : "") + std::to_string(r + 1);
    for (DistortionKind k : kinds) {
      for (int l = 1; l <= kLevelCount; ++l) {
        ManifestEntry e;
        e.id = video_id(label, k, l);
        e.reference_label = label;
        e.category = cat;
        e.spec = t.spec(k, l);
        e.seed = distortion_seed(1, static_cast<std::size_t>(r), k, l);
        e.path = e.id + ".y4m";
        m.push_back(std::move(e));
      }
    }
  }
  return m;
}

}  // namespace lapvqa::test

#endif  // LAPVQA_TESTS_SUPPORT_HPP
