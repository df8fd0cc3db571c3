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

#include "lapvqa/synth.hpp"

#include "lapvqa/filter.hpp"
#include "lapvqa/random.hpp"
#include "lapvqa/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

namespace fs = std::filesystem;

namespace lapvqa {

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::Noise: return "Noise";
    case DistortionKind::DefocusBlur: return "DefocusBlur";
    case DistortionKind::MotionBlur: return "MotionBlur";
    case DistortionKind::UnevenIllumination: return "UnevenIllumination";
    case DistortionKind::Smoke: return "Smoke";
  }
  return "?";
}

std::optional<DistortionKind> parse_kind(std::string_view name) {
  for (DistortionKind k : kAllKinds) {
    if (to_string(k) == name || short_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view short_name(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::Noise: return "noise";
    case DistortionKind::DefocusBlur: return "defocus";
    case DistortionKind::MotionBlur: return "motion";
    case DistortionKind::UnevenIllumination: return "illumination";
    case DistortionKind::Smoke: return "smoke";
  }
  return "?";
}

std::string_view to_string(ContentCategory c) {
  static constexpr std::array<std::string_view, 10> names = {"BL", "GB", "MI", "IR", "CL",
                                                             "SA", "CU", "SF", "OE", "BU"};
  return names[static_cast<std::size_t>(c)];
}

std::optional<ContentCategory> parse_category(std::string_view code) {
  for (ContentCategory c : kAllCategories) {
    if (to_string(c) == code) return c;
  }
  return std::nullopt;
}

DistortionKind kind_of(const DistortionParams& params) {
  return static_cast<DistortionKind>(params.index());
}

void validate(const DistortionParams& params) {
  struct Visitor {
    void operator()(const NoiseParams& p) const {
      if (!(p.variance >= 0.0) || !std::isfinite(p.variance)) throw std::invalid_argument("noise variance must be >= 0");
    }
    void operator()(const DefocusParams& p) const {
      if (!(p.sigma > 0.0)) throw std::invalid_argument("defocus sigma must be > 0");
      if (p.ksize < 3 || p.ksize % 2 == 0) throw std::invalid_argument("defocus ksize must be odd and >= 3");
    }
    void operator()(const MotionParams& p) const {
      if (!(p.length >= 1.0)) throw std::invalid_argument("motion length must be >= 1");
      if (!std::isfinite(p.angle_deg)) throw std::invalid_argument("motion angle must be finite");
    }
    void operator()(const IlluminationParams& p) const {
      if (!(p.radius_frac > 0.0)) throw std::invalid_argument("illumination radius must be > 0");
      if (!(p.falloff_frac > 0.0)) throw std::invalid_argument("illumination falloff must be > 0");
      if (!(p.floor >= 0.0 && p.floor < 1.0)) throw std::invalid_argument("illumination floor must be in [0, 1)");
      if (!std::isfinite(p.center_x_frac) || !std::isfinite(p.center_y_frac)) {
        throw std::invalid_argument("illumination center must be finite");
      }
    }
    void operator()(const SmokeParams& p) const {
      if (!(p.opacity >= 0.0 && p.opacity <= 1.0)) throw std::invalid_argument("smoke opacity must be in [0, 1]");
    }
  };
  std::visit(Visitor{}, params);
}

IncompleteLevelTable::IncompleteLevelTable(DistortionKind kind, int level)
    : std::runtime_error("level table has no parameters for (" + std::string(to_string(kind)) +
                         ", level " + std::to_string(level) + ")"),
      kind_(kind),
      level_(level) {}

LevelTable LevelTable::defaults() {
  LevelTable t;
  const std::array<double, 4> sigmas = {1.0, 2.0, 3.0, 5.0};
  const std::array<double, 4> lengths = {5.0, 9.0, 15.0, 21.0};
  const std::array<double, 4> variances = {0.0005, 0.002, 0.008, 0.02};
  const std::array<std::pair<double, double>, 4> illum = {
      std::pair{0.45, 0.35}, std::pair{0.35, 0.25}, std::pair{0.28, 0.15}, std::pair{0.20, 0.08}};
  const std::array<double, 4> opacities = {0.25, 0.45, 0.65, 0.85};
  for (int l = 1; l <= kLevelCount; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    t.set(DistortionKind::Noise, l, NoiseParams{variances[i]});
    const int ksize = 2 * static_cast<int>(std::ceil(3.0 * sigmas[i])) + 1;
    t.set(DistortionKind::DefocusBlur, l, DefocusParams{sigmas[i], ksize});
    t.set(DistortionKind::MotionBlur, l, MotionParams{lengths[i], 0.0});
    IlluminationParams ip;
    ip.radius_frac = illum[i].first;
    ip.floor = illum[i].second;
    t.set(DistortionKind::UnevenIllumination, l, ip);
    t.set(DistortionKind::Smoke, l, SmokeParams{opacities[i]});
  }
  return t;
}

void LevelTable::set(DistortionKind kind, int level, DistortionParams params) {
  if (level < 1 || level > kLevelCount) throw std::invalid_argument("level must be in 1..4");
  if (kind_of(params) != kind) {
    throw std::invalid_argument("parameters do not match distortion kind " + std::string(to_string(kind)));
  }
  validate(params);
  cells_[{kind, level}] = std::move(params);
}

const DistortionParams& LevelTable::at(DistortionKind kind, int level) const {
  const auto it = cells_.find({kind, level});
  if (it == cells_.end()) throw IncompleteLevelTable(kind, level);
  return it->second;
}

bool LevelTable::contains(DistortionKind kind, int level) const {
  return cells_.contains({kind, level});
}

void LevelTable::validate_complete() const {
  for (DistortionKind k : kAllKinds) {
    for (int l = 1; l <= kLevelCount; ++l) validate(at(k, l));
  }
}

namespace {

template <typename PerFrame>
VideoClip map_frames(const VideoClip& clip, PerFrame&& fn) {
  std::vector<Frame> out;
  out.reserve(clip.size());
  for (std::size_t i = 0; i < clip.size(); ++i) out.push_back(fn(clip.frame(i), i));
  return with_frames(clip, std::move(out));
}

}  // namespace

VideoClip apply_defocus_blur(const VideoClip& clip, double sigma, int ksize) {
  validate(DefocusParams{sigma, ksize});
  if (ksize > std::min(clip.width(), clip.height())) {
    throw std::invalid_argument("defocus ksize exceeds the frame size");
  }
  const Kernel1d<float> k = gaussian_kernel_1d(static_cast<float>(sigma), ksize);
  return map_frames(clip, [&](const Frame& f, std::size_t) {
    RgbPlanes<float> planes = split_channels<float>(f);
    for (auto& p : planes) p = convolve_separable(p, k);
    return merge_channels(planes);
  });
}

Plane<double> motion_kernel(double length, double angle_deg) {
  validate(MotionParams{length, angle_deg});
  const double half = (length - 1.0) / 2.0;
  const double theta = angle_deg * M_PI / 180.0;
  // Image rows grow downward, so a positive angle tilts the line upward.
  const Eigen::Vector2d u(std::cos(theta), -std::sin(theta));
  const int r = static_cast<int>(std::ceil(half)) + 1;
  Plane<double> k = Plane<double>::Zero(2 * r + 1, 2 * r + 1);
  int extent_x = 0, extent_y = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const Eigen::Vector2d p(dx, dy);
      const double t = std::clamp(p.dot(u), -half, half);
      const double d = (p - t * u).norm();
      const double w = std::max(0.0, 1.0 - d);
      if (w > 1e-12) {
        k(dy + r, dx + r) = w;
        extent_x = std::max(extent_x, std::abs(dx));
        extent_y = std::max(extent_y, std::abs(dy));
      }
    }
  }
  Plane<double> cropped = k.block(r - extent_y, r - extent_x, 2 * extent_y + 1, 2 * extent_x + 1);
  return cropped / cropped.sum();
}

VideoClip apply_motion_blur(const VideoClip& clip, double length, double angle_deg) {
  const Plane<float> k = motion_kernel(length, angle_deg).cast<float>();
  if (k.size() == 1) return clip;
  return map_frames(clip, [&](const Frame& f, std::size_t) {
    RgbPlanes<float> planes = split_channels<float>(f);
    for (auto& p : planes) p = convolve_2d(p, k);
    return merge_channels(planes);
  });
}

VideoClip apply_awgn(const VideoClip& clip, double variance, std::uint64_t seed) {
  validate(NoiseParams{variance});
  if (variance == 0.0) return clip;
  const double stddev = std::sqrt(variance);
  return map_frames(clip, [&](const Frame& f, std::size_t index) {
    std::mt19937_64 rng(derive_seed(seed, {index}));
    std::normal_distribution<double> normal(0.0, stddev);
    Frame out = f;
    for (auto& v : out.pixels()) {
      const double x = std::clamp(v / 255.0 + normal(rng), 0.0, 1.0);
      v = quantize(x * 255.0);
    }
    return out;
  });
}

IlluminationMask make_illumination_mask(int width, int height, Eigen::Vector2d center, double radius,
                                        double falloff, double floor) {
  if (!(radius > 0.0)) throw std::invalid_argument("illumination radius must be > 0");
  if (!(falloff > 0.0)) throw std::invalid_argument("illumination falloff must be > 0");
  if (!(floor >= 0.0 && floor < 1.0)) throw std::invalid_argument("illumination floor must be in [0, 1)");
  IlluminationMask mask{width, height, Plane<double>(height, width)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double d = (Eigen::Vector2d(x, y) - center).norm();
      const double excess = d - radius;
      mask.gain(y, x) = excess <= 0.0
                            ? 1.0
                            : floor + (1.0 - floor) * std::exp(-excess * excess / (2.0 * falloff * falloff));
    }
  }
  return mask;
}

IlluminationMask make_illumination_mask(int width, int height, const IlluminationParams& p) {
  validate(p);
  const double side = std::min(width, height);
  return make_illumination_mask(width, height,
                                Eigen::Vector2d(p.center_x_frac * width, p.center_y_frac * height),
                                p.radius_frac * side, p.falloff_frac * side, p.floor);
}

VideoClip apply_uneven_illumination(const VideoClip& clip, const IlluminationMask& mask) {
  if (mask.width != clip.width() || mask.height != clip.height() || mask.gain.rows() != clip.height() ||
      mask.gain.cols() != clip.width()) {
    throw std::invalid_argument("illumination mask dimensions differ from the clip");
  }
  return map_frames(clip, [&](const Frame& f, std::size_t) {
    Frame out = f;
    auto px = out.pixels();
    const double* gain = mask.gain.data();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize(px[i] * gain[i / 3]);
    return out;
  });
}

VideoClip apply_smoke(const VideoClip& clip, const VideoClip& smoke, double opacity) {
  validate(SmokeParams{opacity});
  if (smoke.empty() || smoke.width() != clip.width() || smoke.height() != clip.height()) {
    throw std::invalid_argument("smoke clip dimensions differ from the clip");
  }
  return map_frames(clip, [&](const Frame& f, std::size_t index) {
    const Frame& s = smoke.frame(index % smoke.size());
    Frame out = f;
    auto px = out.pixels();
    const auto sp = s.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      // 255 * (1 - (1 - a)(1 - opacity * b)), rearranged so black smoke is exact.
      const double v = px[i];
      px[i] = quantize(v + (255.0 - v) * opacity * (sp[i] / 255.0));
    }
    return out;
  });
}

VideoClip gen_smoke_clip(int width, int height, int nframes, std::uint64_t seed, FrameRate fps) {
  if (width < 16 || height < 16) throw std::invalid_argument("smoke clip must be at least 16x16");
  if (nframes < 1) throw std::invalid_argument("smoke clip needs at least one frame");

  std::mt19937_64 rng(derive_seed(seed, {0x5707e}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double plume_x = (0.3 + 0.4 * unit(rng)) * width;
  const double plume_y = (0.45 + 0.3 * unit(rng)) * height;
  const double drift = (unit(rng) - 0.5) * 0.02;
  const std::uint64_t warp_seed = derive_seed(seed, {1});
  const std::uint64_t density_seed = derive_seed(seed, {2});

  // Noise is evaluated on a half-resolution lattice and bilinearly upsampled.
  const int gw = width / 2 + 2, gh = height / 2 + 2;
  const double scale = std::min(width, height) / 2.5;
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(nframes));
  Plane<double> grid(gh, gw);
  for (int t = 0; t < nframes; ++t) {
    const double rise = 0.035 * t;
    for (int gy = 0; gy < gh; ++gy) {
      for (int gx = 0; gx < gw; ++gx) {
        const double u = 2.0 * gx / scale, v = 2.0 * gy / scale;
        const double q = fractal_noise(0.8 * u + 0.01 * t, 0.8 * v + rise, 3, warp_seed);
        const double d = fractal_noise(u + 1.6 * q + drift * t, v + 1.6 * q + rise, 5, density_seed);
        // A dense haze with brighter billows, like a cautery plume filling the view.
        const double s = std::clamp((d - 0.3) / 0.4, 0.0, 1.0);
        const double density = 0.55 + 0.45 * s * s * (3.0 - 2.0 * s);
        const double ex = (2.0 * gx - plume_x) / (0.55 * width);
        const double ey = (2.0 * gy - plume_y) / (0.7 * height);
        const double envelope = 0.7 + 0.3 * std::exp(-(ex * ex + ey * ey));
        grid(gy, gx) = 255.0 * density * envelope;
      }
    }
    Frame frame(width, height);
    for (int y = 0; y < height; ++y) {
      const double fy = y / 2.0;
      const int y0 = static_cast<int>(fy);
      const double ty = fy - y0;
      for (int x = 0; x < width; ++x) {
        const double fx = x / 2.0;
        const int x0 = static_cast<int>(fx);
        const double tx = fx - x0;
        const double top = grid(y0, x0) + (grid(y0, x0 + 1) - grid(y0, x0)) * tx;
        const double bottom = grid(y0 + 1, x0) + (grid(y0 + 1, x0 + 1) - grid(y0 + 1, x0)) * tx;
        const std::uint8_t g = quantize(top + (bottom - top) * ty);
        frame.at(x, y, 0) = g;
        frame.at(x, y, 1) = g;
        frame.at(x, y, 2) = g;
      }
    }
    frames.push_back(std::move(frame));
  }
  return VideoClip(std::move(frames), fps);
}

VideoClip apply_distortion(const VideoClip& reference, const DistortionSpec& spec, std::uint64_t seed) {
  if (kind_of(spec.params) != spec.kind) throw std::invalid_argument("spec kind does not match its parameters");
  switch (spec.kind) {
    case DistortionKind::Noise:
      return apply_awgn(reference, std::get<NoiseParams>(spec.params).variance, seed);
    case DistortionKind::DefocusBlur: {
      const auto& p = std::get<DefocusParams>(spec.params);
      return apply_defocus_blur(reference, p.sigma, p.ksize);
    }
    case DistortionKind::MotionBlur: {
      const auto& p = std::get<MotionParams>(spec.params);
      return apply_motion_blur(reference, p.length, p.angle_deg);
    }
    case DistortionKind::UnevenIllumination:
      return apply_uneven_illumination(
          reference, make_illumination_mask(reference.width(), reference.height(),
                                            std::get<IlluminationParams>(spec.params)));
    case DistortionKind::Smoke: {
      const VideoClip smoke = gen_smoke_clip(reference.width(), reference.height(),
                                             static_cast<int>(reference.size()), seed, reference.fps());
      return apply_smoke(reference, smoke, std::get<SmokeParams>(spec.params).opacity);
    }
  }
  throw std::invalid_argument("unknown distortion kind");
}

ReferenceVideo ReferenceVideo::in_memory(std::string label, ContentCategory category, VideoClip clip) {
  auto shared = std::make_shared<const VideoClip>(std::move(clip));
  return {std::move(label), category, [shared] { return *shared; }};
}

ReferenceVideo ReferenceVideo::from_file(std::string label, ContentCategory category, fs::path path) {
  return {std::move(label), category, [path] { return read_clip(path, detect_format(path)); }};
}

std::string video_id(std::string_view reference_label, DistortionKind kind, int level) {
  return std::string(reference_label) + "_" + std::string(short_name(kind)) + "_L" + std::to_string(level);
}

std::uint64_t distortion_seed(std::uint64_t master_seed, std::size_t reference_index, DistortionKind kind,
                              int level) {
  const auto k = static_cast<std::uint64_t>(kind);
  const auto l = kind == DistortionKind::Smoke ? 0ULL : static_cast<std::uint64_t>(level);
  return derive_seed(master_seed, {reference_index, k, l});
}

Manifest plan_corpus(std::span<const ReferenceVideo> references, const LevelTable& levels, std::uint64_t seed,
                     ClipFormat format) {
  levels.validate_complete();
  std::set<std::string> labels;
  for (const auto& r : references) {
    if (r.label.empty()) throw std::invalid_argument("reference label must not be empty");
    if (!labels.insert(r.label).second) throw std::invalid_argument("duplicate reference label " + r.label);
  }
  Manifest manifest;
  manifest.reserve(references.size() * kAllKinds.size() * kLevelCount);
  for (std::size_t r = 0; r < references.size(); ++r) {
    for (DistortionKind kind : kAllKinds) {
      for (int level = 1; level <= kLevelCount; ++level) {
        ManifestEntry e;
        e.id = video_id(references[r].label, kind, level);
        e.reference_label = references[r].label;
        e.category = references[r].category;
        e.spec = levels.spec(kind, level);
        e.seed = distortion_seed(seed, r, kind, level);
        e.path = format == ClipFormat::Y4m ? e.id + ".y4m" : e.id;
        manifest.push_back(std::move(e));
      }
    }
  }
  return manifest;
}

Manifest synthesize_corpus(std::span<const ReferenceVideo> references, const LevelTable& levels,
                           std::uint64_t seed, const fs::path& out_dir, ClipFormat format,
                           const CorpusProgress& progress) {
  Manifest manifest = plan_corpus(references, levels, seed, format);
  fs::create_directories(out_dir);
  std::size_t done = 0;
  auto entry = manifest.begin();
  for (const auto& ref : references) {
    const VideoClip clip = ref.load();
    std::optional<std::pair<std::uint64_t, VideoClip>> smoke;
    for (std::size_t i = 0; i < kAllKinds.size() * kLevelCount; ++i, ++entry) {
      VideoClip distorted;
      if (entry->spec.kind == DistortionKind::Smoke) {
        if (!smoke || smoke->first != entry->seed) {
          smoke.emplace(entry->seed, gen_smoke_clip(clip.width(), clip.height(), static_cast<int>(clip.size()),
                                                    entry->seed, clip.fps()));
        }
        distorted = apply_smoke(clip, smoke->second, std::get<SmokeParams>(entry->spec.params).opacity);
      } else {
        distorted = apply_distortion(clip, entry->spec, entry->seed);
      }
      write_clip(distorted, out_dir / entry->path, format);
      ++done;
      if (progress) progress(*entry, done, manifest.size());
    }
  }
  write_manifest(manifest, out_dir / kManifestFileName);
  return manifest;
}

}  // namespace lapvqa
