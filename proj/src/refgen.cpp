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

#include "lapvqa/refgen.hpp"

#include "lapvqa/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lapvqa {

namespace {

using Rgb = Eigen::Array3d;

struct SceneStyle {
  Rgb tissue_a;
  Rgb tissue_b;
  Rgb fat;
  double fat_amount;       // fraction of the texture covered by fat
  double feature_px;       // base texture feature size
  int detail_octaves;
  double vessel_density;
  int instruments;
  int highlights;
  double blood;            // blood pool coverage
  double char_spots;       // burn marks
  double pan_speed;        // pixels per frame
  double stretch;          // anisotropic texture stretch
  double exposure = 1.0;   // light source gain; real scopes vary a lot here
};

SceneStyle style_for(ContentCategory c) {
  SceneStyle s{Rgb(218, 142, 126), Rgb(196, 112, 102), Rgb(228, 200, 138), 0.15, 70.0, 5,
               0.5, 2, 6, 0.0, 0.0, 0.35, 1.0};
  switch (c) {
    case ContentCategory::BL: s.exposure = 0.9; s.blood = 0.22; s.instruments = 1; s.tissue_a = Rgb(214, 130, 118); break;
    case ContentCategory::GB: s.char_spots = 0.08; s.feature_px = 55; break;
    case ContentCategory::MI: s.exposure = 1.05; s.instruments = 4; s.feature_px = 80; s.highlights = 8; break;
    case ContentCategory::IR: s.exposure = 1.15; s.highlights = 16; s.instruments = 1; s.tissue_a = Rgb(225, 150, 134); s.detail_octaves = 4; break;
    case ContentCategory::CL: s.exposure = 0.95; s.instruments = 2; s.feature_px = 45; s.detail_octaves = 6; break;
    case ContentCategory::SA: s.stretch = 1.8; s.pan_speed = 0.6; s.fat_amount = 0.3; break;
    case ContentCategory::CU: s.exposure = 0.9; s.instruments = 2; s.feature_px = 38; s.detail_octaves = 6; s.vessel_density = 0.8; break;
    case ContentCategory::SF: s.exposure = 1.1; s.stretch = 0.6; s.pan_speed = 0.8; s.feature_px = 90; break;
    case ContentCategory::OE: s.exposure = 1.2; s.fat_amount = 0.45; s.fat = Rgb(222, 205, 130); s.feature_px = 110; s.detail_octaves = 4; break;
    case ContentCategory::BU: s.exposure = 0.85; s.char_spots = 0.12; s.instruments = 1; s.tissue_a = Rgb(212, 138, 116); break;
  }
  return s;
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct Instrument {
  Eigen::Vector2d base;   // off-screen anchor
  Eigen::Vector2d tip;    // tip at t = 0
  Eigen::Vector2d sway;   // tip oscillation amplitude
  double omega;
  double phase;
  double radius;
  double tone;
};

struct Highlight {
  Eigen::Vector2d pos;
  double radius;
  double strength;
};

// Static tissue texture larger than the frame; frames are windows into it.
std::array<Plane<double>, 3> tissue_texture(const SceneStyle& st, int tw, int th, std::uint64_t seed) {
  std::array<Plane<double>, 3> tex;
  for (auto& p : tex) p.resize(th, tw);
  const std::uint64_t s_mix = derive_seed(seed, {10});
  const std::uint64_t s_shade = derive_seed(seed, {11});
  const std::uint64_t s_vessel = derive_seed(seed, {12});
  const std::uint64_t s_fat = derive_seed(seed, {13});
  const std::uint64_t s_blood = derive_seed(seed, {14});
  const std::uint64_t s_char = derive_seed(seed, {15});
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      const double u = x / (st.feature_px * st.stretch);
      const double v = y / st.feature_px;
      const double mix = fractal_noise(0.5 * u, 0.5 * v, 3, s_mix);
      const double shade = fractal_noise(u, v, st.detail_octaves, s_shade);
      Rgb c = st.tissue_a + (st.tissue_b - st.tissue_a) * smoothstep(0.3, 0.7, mix);
      const double fat = smoothstep(1.0 - st.fat_amount - 0.08, 1.0 - st.fat_amount + 0.08,
                                    fractal_noise(0.35 * u + 7.0, 0.35 * v, 3, s_fat));
      c = c + (st.fat - c) * fat;
      c *= 0.62 + 0.55 * shade;
      const double ridge = 1.0 - std::abs(2.0 * fractal_noise(1.3 * u, 1.3 * v, 4, s_vessel) - 1.0);
      const double vessel = st.vessel_density * smoothstep(0.90, 0.975, ridge) * (1.0 - fat);
      c = c + (Rgb(150, 58, 62) - c) * vessel;
      if (st.blood > 0.0) {
        const double b = smoothstep(1.0 - st.blood - 0.05, 1.0 - st.blood + 0.05,
                                    fractal_noise(0.6 * u, 0.6 * v + 3.0, 3, s_blood));
        c = c + (Rgb(150, 40, 36) - c) * b;
      }
      if (st.char_spots > 0.0) {
        const double b = smoothstep(1.0 - st.char_spots - 0.03, 1.0 - st.char_spots + 0.03,
                                    fractal_noise(1.1 * u + 2.0, 1.1 * v, 4, s_char));
        c = c + (Rgb(70, 40, 32) - c) * b;
      }
      for (int ch = 0; ch < 3; ++ch) tex[ch](y, x) = c(ch);
    }
  }
  return tex;
}

double sample_bilinear(const Plane<double>& p, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(p.cols() - 2));
  y = std::clamp(y, 0.0, static_cast<double>(p.rows() - 2));
  const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
  const double tx = x - x0, ty = y - y0;
  const double top = p(y0, x0) + (p(y0, x0 + 1) - p(y0, x0)) * tx;
  const double bottom = p(y0 + 1, x0) + (p(y0 + 1, x0 + 1) - p(y0 + 1, x0)) * tx;
  return top + (bottom - top) * ty;
}

}  // namespace

VideoClip gen_reference_clip(ContentCategory category, const ReferenceOptions& opt, std::uint64_t seed) {
  if (opt.width < 16 || opt.height < 16 || opt.frames < 1) {
    throw std::invalid_argument("reference clip must be at least 16x16 with one frame");
  }
  const SceneStyle st = style_for(category);
  std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(category)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int w = opt.width, h = opt.height;

  const double travel = st.pan_speed * opt.frames;
  const int margin = static_cast<int>(std::ceil(std::min(travel, 4.0 * w))) / 2 + 8;
  const int tw = w + 2 * margin, th = h + 2 * margin;
  const auto tex = tissue_texture(st, tw, th, derive_seed(seed, {1}));
  const double pan_angle = 2.0 * M_PI * unit(rng);
  const Eigen::Vector2d pan_dir(std::cos(pan_angle), std::sin(pan_angle));

  std::vector<Instrument> tools;
  for (int i = 0; i < st.instruments; ++i) {
    const double side = 2.0 * M_PI * unit(rng);
    Instrument t;
    t.base = Eigen::Vector2d(w / 2.0 + 0.9 * w * std::cos(side), h / 2.0 + 0.9 * h * std::sin(side));
    t.tip = Eigen::Vector2d((0.25 + 0.5 * unit(rng)) * w, (0.25 + 0.5 * unit(rng)) * h);
    t.sway = Eigen::Vector2d((unit(rng) - 0.5) * 0.15 * w, (unit(rng) - 0.5) * 0.15 * h);
    t.omega = 2.0 * M_PI / (60.0 + 120.0 * unit(rng));
    t.phase = 2.0 * M_PI * unit(rng);
    t.radius = (0.028 + 0.03 * unit(rng)) * h;
    t.tone = 150.0 + 45.0 * unit(rng);
    tools.push_back(t);
  }
  std::vector<Highlight> highlights;
  for (int i = 0; i < st.highlights; ++i) {
    highlights.push_back({Eigen::Vector2d(unit(rng) * tw, unit(rng) * th), 1.5 + 3.5 * unit(rng),
                          0.7 + 0.6 * unit(rng)});
  }

  const double vignette_r2 = 0.25 * (w * w + h * h);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(opt.frames));
  for (int f = 0; f < opt.frames; ++f) {
    std::mt19937_64 frng(derive_seed(seed, {2, static_cast<std::uint64_t>(f)}));
    std::normal_distribution<double> sensor(0.0, 3.0);
    const Eigen::Vector2d offset =
        Eigen::Vector2d(margin, margin) + pan_dir * (st.pan_speed * (f - opt.frames / 2.0)) +
        Eigen::Vector2d(2.0 * std::sin(0.05 * f), 1.5 * std::sin(0.031 * f + 1.0));

    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments;
    for (const auto& t : tools) {
      const Eigen::Vector2d tip = t.tip + t.sway * std::sin(t.omega * f + t.phase);
      segments.emplace_back(t.base, tip);
    }

    Frame frame(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double sx = x + offset.x(), sy = y + offset.y();
        Rgb c(sample_bilinear(tex[0], sx, sy), sample_bilinear(tex[1], sx, sy),
              sample_bilinear(tex[2], sx, sy));
        for (const auto& hl : highlights) {
          const double dx = sx - hl.pos.x(), dy = sy - hl.pos.y();
          const double d2 = dx * dx + dy * dy;
          if (d2 < 36.0 * hl.radius * hl.radius) {
            c += hl.strength * 255.0 * std::exp(-d2 / (2.0 * hl.radius * hl.radius));
          }
        }
        const Eigen::Vector2d p(x, y);
        for (std::size_t i = 0; i < tools.size(); ++i) {
          const auto& [a, b] = segments[i];
          const Eigen::Vector2d ab = b - a;
          const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
          const double d = (p - (a + s * ab)).norm();
          const double r = tools[i].radius;
          if (d < r + 1.0) {
            const double profile = std::clamp(d / r, 0.0, 1.0);
            const double shade = 0.45 + 0.55 * std::sqrt(1.0 - profile * profile);
            const double g = tools[i].tone * shade + 60.0 * std::exp(-std::pow((profile - 0.35) / 0.12, 2));
            const Rgb metal(g - 4.0, g, g + 6.0);
            const double alpha = std::clamp(r + 1.0 - d, 0.0, 1.0);
            c = c + (metal - c) * alpha;
          }
        }
        const double r2 = (x - w / 2.0) * (x - w / 2.0) + (y - h / 2.0) * (y - h / 2.0);
        c *= st.exposure * (1.0 - 0.18 * r2 / vignette_r2);
        for (int ch = 0; ch < 3; ++ch) frame.at(x, y, ch) = quantize(c(ch) + sensor(frng));
      }
    }
    frames.push_back(std::move(frame));
  }
  return VideoClip(std::move(frames), opt.fps);
}

std::vector<ReferenceVideo> gen_reference_set(int count, const ReferenceOptions& options, std::uint64_t seed) {
  std::vector<ReferenceVideo> refs;
  for (int i = 0; i < count; ++i) {
    const ContentCategory c = kAllCategories[static_cast<std::size_t>(i) % kAllCategories.size()];
    char label[16];
    std::snprintf(label, sizeof label, "%s%02d", std::string(to_string(c)).c_str(),
                  i / static_cast<int>(kAllCategories.size()) + 1);
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(i)});
    refs.push_back({label, c, [c, options, s] { return gen_reference_clip(c, options, s); }});
  }
  return refs;
}

}  // namespace lapvqa
