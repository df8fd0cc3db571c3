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

#include "lapvqa/filter.hpp"
#include "lapvqa/metrics.hpp"
#include "lapvqa/refgen.hpp"
#include "lapvqa/serialize.hpp"
#include "lapvqa/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace lapvqa;

namespace {

double mean_luma(const VideoClip& clip) {
  double s = 0.0;
  for (const auto& f : clip.frames()) s += to_luma(f).mean();
  return s / static_cast<double>(clip.size());
}

double clip_psnr(const VideoClip& ref, const VideoClip& dist) {
  return score_clip(Metric::PSNR, ref, dist).video_score;
}

}  // namespace

TEST_CASE("defocus of a single white pixel matches a direct 5x5 convolution") {
  Frame f(5, 5);
  f.at(2, 2, 0) = f.at(2, 2, 1) = f.at(2, 2, 2) = 255;
  const Frame out = apply_defocus_blur(VideoClip({f}), 1.0, 5).frame(0);

  // Independent kernel: unnormalised exp(-d^2/2) over a 5x5 grid.
  double w[5][5], total = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      w[i][j] = std::exp(-((i - 2) * (i - 2) + (j - 2) * (j - 2)) / 2.0);
      total += w[i][j];
    }
  }
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      const double expect = 255.0 * w[y][x] / total;
      CHECK(out.at(x, y, 1) == static_cast<int>(std::floor(expect + 0.5)));
    }
  }
  CHECK(out.at(2, 2, 0) == 41);
}

TEST_CASE("gaussian kernels are normalised and peak at the centre") {
  for (double sigma : {0.5, 1.0, 2.0, 5.0}) {
    const int ksize = 2 * static_cast<int>(std::ceil(3 * sigma)) + 1;
    const Plane<double> k = gaussian_kernel_2d(sigma, ksize);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k(ksize / 2, ksize / 2) == k.maxCoeff());
  }
  CHECK_THROWS(apply_defocus_blur(VideoClip({Frame(8, 8)}), 1.0, 4));
  CHECK_THROWS(apply_defocus_blur(VideoClip({Frame(8, 8)}), 1.0, 9));
}

TEST_CASE("blurs leave a constant frame unchanged") {
  const VideoClip flat({test::uniform_frame(40, 30, 90, 140, 200)});
  CHECK(apply_defocus_blur(flat, 3.0, 19) == flat);
  CHECK(apply_motion_blur(flat, 15, 0) == flat);
  CHECK(apply_motion_blur(flat, 9, 37) == flat);
}

TEST_CASE("horizontal motion blur of a step edge is a 9-wide moving average") {
  Frame f(40, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 20; x < 40; ++x) f.at(x, y, 0) = f.at(x, y, 1) = f.at(x, y, 2) = 200;
  }
  const Frame out = apply_motion_blur(VideoClip({f}), 9, 0).frame(0);
  int ramp = 0;
  for (int x = 0; x < 40; ++x) {
    double s = 0.0;
    for (int d = -4; d <= 4; ++d) s += std::clamp(x + d, 0, 39) >= 20 ? 200.0 : 0.0;
    const int expect = static_cast<int>(std::floor(s / 9.0 + 0.5));
    CHECK(out.at(x, 2, 0) == expect);
    if (expect > 0 && expect < 200) ++ramp;
  }
  CHECK(ramp == 8);  // 9 taps give 8 intermediate values between the plateaus
}

TEST_CASE("motion kernels sum to one and length 1 is the identity") {
  for (double len : {1.0, 2.5, 5.0, 9.0, 21.0}) {
    for (double ang : {0.0, 30.0, 45.0, 90.0, 133.0}) {
      const Plane<double> k = motion_kernel(len, ang);
      CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(k.minCoeff() >= 0.0);
    }
  }
  const Plane<double> one = motion_kernel(1.0, 25.0);
  CHECK(one.size() == 1);
  const VideoClip clip = test::textured_clip(32, 24, 2, 4);
  CHECK(apply_motion_blur(clip, 1.0, 0.0) == clip);
  CHECK(apply_motion_blur(clip, 1.0, 70.0) == clip);
}

TEST_CASE("vertical motion kernel is the transpose of the horizontal one") {
  const Plane<double> h = motion_kernel(9, 0);
  const Plane<double> v = motion_kernel(9, 90);
  REQUIRE(h.rows() == v.cols());
  CHECK((h.transpose() - v).abs().maxCoeff() < 1e-12);
}

TEST_CASE("AWGN has the requested variance on a mid-grey frame") {
  const VideoClip grey({test::uniform_frame(256, 256, 128, 128, 128)});
  const Frame out = apply_awgn(grey, 0.01, 42).frame(0);
  double sum = 0.0, sum2 = 0.0;
  const auto px = out.pixels();
  for (auto v : px) {
    const double d = (v - 128.0) / 255.0;
    sum += d;
    sum2 += d * d;
  }
  const double n = static_cast<double>(px.size());
  const double var = sum2 / n - (sum / n) * (sum / n);
  CHECK(var == doctest::Approx(0.01).epsilon(0.15));
}

TEST_CASE("AWGN is deterministic in its seed and differs across seeds") {
  const VideoClip clip = test::textured_clip(32, 24, 3, 1);
  CHECK(apply_awgn(clip, 0.004, 9) == apply_awgn(clip, 0.004, 9));
  CHECK_FALSE(apply_awgn(clip, 0.004, 9) == apply_awgn(clip, 0.004, 10));
  CHECK(apply_awgn(clip, 0.0, 9) == clip);
}

TEST_CASE("illumination mask follows the gaussian falloff formula") {
  const IlluminationMask m = make_illumination_mask(200, 100, Eigen::Vector2d(50, 50), 20.0, 10.0, 0.0);
  CHECK(m.gain(50, 50) == 1.0);
  CHECK(m.gain(50, 70) == 1.0);                                   // d == radius
  CHECK(m.gain(50, 80) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));  // d == radius + falloff

  const IlluminationMask far = make_illumination_mask(400, 10, Eigen::Vector2d(0, 0), 5.0, 3.0, 0.2);
  CHECK(far.gain(0, 399) == doctest::Approx(0.2).epsilon(1e-9));

  // Centre outside the frame is allowed.
  CHECK_NOTHROW(make_illumination_mask(20, 20, Eigen::Vector2d(-30, 50), 5.0, 3.0, 0.1));
}

TEST_CASE("illumination gain never increases with distance from the bright circle") {
  for (const auto& [k, params] : std::vector<std::pair<int, IlluminationParams>>{
           {1, std::get<IlluminationParams>(LevelTable::defaults().at(DistortionKind::UnevenIllumination, 1))},
           {4, std::get<IlluminationParams>(LevelTable::defaults().at(DistortionKind::UnevenIllumination, 4))}}) {
    CAPTURE(k);
    const IlluminationMask m = make_illumination_mask(128, 72, params);
    const Eigen::Vector2d c(params.center_x_frac * 128, params.center_y_frac * 72);
    std::vector<std::pair<double, double>> by_distance;
    for (int y = 0; y < 72; ++y) {
      for (int x = 0; x < 128; ++x) by_distance.emplace_back((Eigen::Vector2d(x, y) - c).norm(), m.gain(y, x));
    }
    std::sort(by_distance.begin(), by_distance.end());
    for (std::size_t i = 1; i < by_distance.size(); ++i) CHECK(by_distance[i].second <= by_distance[i - 1].second + 1e-15);
    CHECK(m.gain.maxCoeff() == 1.0);
    CHECK(m.gain.minCoeff() >= params.floor);
  }
}

TEST_CASE("uneven illumination multiplies and rounds half up") {
  Frame f = test::uniform_frame(4, 4, 200, 201, 3);
  IlluminationMask half{4, 4, Plane<double>::Constant(4, 4, 0.5)};
  const Frame out = apply_uneven_illumination(VideoClip({f}), half).frame(0);
  CHECK(out.at(1, 1, 0) == 100);
  CHECK(out.at(1, 1, 1) == 101);  // 100.5 rounds up
  CHECK(out.at(1, 1, 2) == 2);    // 1.5 rounds up

  const VideoClip clip = test::textured_clip(16, 12, 2, 8);
  CHECK(apply_uneven_illumination(clip, IlluminationMask{16, 12, Plane<double>::Ones(12, 16)}) == clip);
  CHECK_THROWS_AS(apply_uneven_illumination(clip, IlluminationMask{15, 12, Plane<double>::Ones(12, 15)}),
                  std::invalid_argument);
}

TEST_CASE("centred mask keeps the centre and darkens the corner") {
  const int w = 120, h = 80;
  const IlluminationMask m = make_illumination_mask(w, h, Eigen::Vector2d(w / 2.0, h / 2.0), w / 4.0, 10.0, 0.1);
  const Frame f = test::uniform_frame(w, h, 180, 180, 180);
  const Frame out = apply_uneven_illumination(VideoClip({f}), m).frame(0);
  CHECK(out.at(w / 2, h / 2, 0) == 180);
  const double d = std::hypot(w / 2.0, h / 2.0) - w / 4.0;
  const double corner_gain = 0.1 + 0.9 * std::exp(-d * d / 200.0);
  CHECK(out.at(0, 0, 0) == static_cast<int>(std::floor(180 * corner_gain + 0.5)));
  CHECK(out.at(0, 0, 0) < 180);
}

TEST_CASE("screen blend follows the complement-product formula") {
  auto screen = [](double a, double b, double opacity) { return 1.0 - (1.0 - a) * (1.0 - opacity * b); };
  CHECK(screen(0.5, 0.5, 0.5) == doctest::Approx(0.625));

  const Frame base = test::textured_frame(16, 16, 2);
  const Frame smoke = test::textured_frame(16, 16, 77);
  const Frame out = apply_smoke(VideoClip({base}), VideoClip({smoke}), 0.5).frame(0);
  for (std::size_t i = 0; i < base.sample_count(); ++i) {
    const double expect = 255.0 * screen(base.pixels()[i] / 255.0, smoke.pixels()[i] / 255.0, 0.5);
    CHECK(std::abs(out.pixels()[i] - expect) <= 0.5 + 1e-9);
  }
}

TEST_CASE("black smoke is the identity and white smoke at full opacity saturates") {
  const VideoClip clip = test::textured_clip(16, 16, 3, 3);
  const VideoClip black({Frame(16, 16)});
  CHECK(apply_smoke(clip, black, 0.85) == clip);
  CHECK(apply_smoke(clip, black, 1.0) == clip);
  const VideoClip white({test::uniform_frame(16, 16, 255, 255, 255)});
  const VideoClip saturated = apply_smoke(clip, white, 1.0);
  for (const auto& f : saturated.frames()) {
    for (auto v : f.pixels()) CHECK(v == 255);
  }
  CHECK_THROWS_AS(apply_smoke(clip, VideoClip({Frame(8, 16)}), 0.5), std::invalid_argument);
}

TEST_CASE("smoke clips loop when shorter than the video") {
  const VideoClip clip = test::textured_clip(16, 16, 5, 3);
  const VideoClip smoke({test::uniform_frame(16, 16, 0, 0, 0), test::uniform_frame(16, 16, 255, 255, 255)});
  const VideoClip out = apply_smoke(clip, smoke, 1.0);
  CHECK(out.frame(0) == clip.frame(0));
  CHECK(out.frame(2) == clip.frame(2));
  CHECK(out.frame(3).at(0, 0, 0) == 255);
}

TEST_CASE("generated smoke is deterministic haze with brighter billows") {
  const VideoClip a = gen_smoke_clip(96, 64, 4, 11);
  CHECK(a == gen_smoke_clip(96, 64, 4, 11));
  CHECK_FALSE(a == gen_smoke_clip(96, 64, 4, 12));
  CHECK(gen_smoke_clip(32, 32, 1, 3).size() == 1);
  CHECK_THROWS(gen_smoke_clip(15, 32, 1, 3));
  for (const auto& f : a.frames()) {
    const LumaPlane y = to_luma(f);
    CHECK(y.mean() > 0.0);
    CHECK(y.mean() < 255.0);
    // The haze never drops below 0.55 density at 0.7 envelope.
    CHECK(y.minCoeff() >= std::floor(255.0 * 0.55 * 0.7));
    CHECK(y.maxCoeff() > y.minCoeff() + 40.0);
  }
}

TEST_CASE("every distortion preserves dimensions and frame count") {
  const VideoClip clip = test::textured_clip(64, 48, 3, 12);
  const LevelTable t = LevelTable::defaults();
  for (DistortionKind k : kAllKinds) {
    for (int l = 1; l <= kLevelCount; ++l) {
      const VideoClip out = apply_distortion(clip, t.spec(k, l), 5);
      CHECK(out.size() == clip.size());
      CHECK(out.width() == clip.width());
      CHECK(out.height() == clip.height());
      CHECK(out.fps() == clip.fps());
      CHECK(out == apply_distortion(clip, t.spec(k, l), 5));
    }
  }
}

TEST_CASE("the default level table is complete and validated") {
  const LevelTable t = LevelTable::defaults();
  CHECK_NOTHROW(t.validate_complete());
  CHECK(std::get<DefocusParams>(t.at(DistortionKind::DefocusBlur, 4)).ksize == 31);
  CHECK(std::get<MotionParams>(t.at(DistortionKind::MotionBlur, 2)).length == 9.0);

  LevelTable partial;
  partial.set(DistortionKind::Noise, 1, NoiseParams{0.001});
  try {
    partial.validate_complete();
    FAIL("incomplete table accepted");
  } catch (const IncompleteLevelTable& e) {
    CHECK(e.kind() == DistortionKind::Noise);
    CHECK(e.level() == 2);
    CHECK(std::string(e.what()).find("Noise, level 2") != std::string::npos);
  }
  CHECK_THROWS_AS(partial.set(DistortionKind::Smoke, 1, NoiseParams{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(partial.set(DistortionKind::Smoke, 5, SmokeParams{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(partial.set(DistortionKind::Smoke, 1, SmokeParams{1.5}), std::invalid_argument);
}

TEST_CASE("severity is monotone for every kind on a generated reference") {
  ReferenceOptions opts;
  opts.width = 128;
  opts.height = 72;
  opts.frames = 3;
  const LevelTable t = LevelTable::defaults();
  for (ContentCategory cat : {ContentCategory::BL, ContentCategory::SA, ContentCategory::OE}) {
    const VideoClip ref = gen_reference_clip(cat, opts, 21);
    for (DistortionKind k : kAllKinds) {
      CAPTURE(to_string(k));
      double previous = k == DistortionKind::UnevenIllumination ? mean_luma(ref) : kPsnrIdentical;
      for (int l = 1; l <= kLevelCount; ++l) {
        const VideoClip d = apply_distortion(ref, t.spec(k, l), distortion_seed(1, 0, k, l));
        const double proxy = k == DistortionKind::UnevenIllumination ? mean_luma(d) : clip_psnr(ref, d);
        CHECK(proxy < previous);
        previous = proxy;
      }
    }
  }
}

TEST_CASE("one reference yields twenty videos with a faithful manifest") {
  test::TempDir dir("corpus");
  ReferenceOptions opts;
  opts.width = 48;
  opts.height = 32;
  opts.frames = 2;
  const auto refs = gen_reference_set(1, opts, 3);
  const Manifest m = synthesize_corpus(refs, LevelTable::defaults(), 7, dir / "c");
  CHECK(m.size() == 20);
  std::set<std::pair<DistortionKind, int>> cells;
  for (const auto& e : m) {
    cells.insert({e.spec.kind, e.spec.level});
    CHECK(std::filesystem::exists(dir.path() / "c" / e.path));
    CHECK(e.spec.params == LevelTable::defaults().at(e.spec.kind, e.spec.level));
  }
  CHECK(cells.size() == 20);
  CHECK(read_manifest(dir.path() / "c" / kManifestFileName) == m);

  const Manifest again = synthesize_corpus(refs, LevelTable::defaults(), 7, dir / "d");
  CHECK(read_text(dir.path() / "c" / kManifestFileName) == read_text(dir.path() / "d" / kManifestFileName));
  for (const auto& e : m) CHECK(read_text(dir.path() / "c" / e.path) == read_text(dir.path() / "d" / e.path));
}

TEST_CASE("corpus synthesis refuses duplicate labels and incomplete tables") {
  test::TempDir dir("corpus-bad");
  const VideoClip clip = test::textured_clip(32, 32, 1, 1);
  std::vector<ReferenceVideo> dup{ReferenceVideo::in_memory("BL01", ContentCategory::BL, clip),
                                  ReferenceVideo::in_memory("BL01", ContentCategory::BL, clip)};
  CHECK_THROWS_AS(plan_corpus(dup, LevelTable::defaults(), 1), std::invalid_argument);
  LevelTable t = LevelTable::defaults();
  LevelTable missing;
  for (DistortionKind k : kAllKinds) {
    for (int l = 1; l <= kLevelCount; ++l) {
      if (!(k == DistortionKind::Smoke && l == 3)) missing.set(k, l, t.at(k, l));
    }
  }
  std::vector<ReferenceVideo> one{dup.front()};
  CHECK_THROWS_AS(synthesize_corpus(one, missing, 1, dir / "x"), IncompleteLevelTable);
}

TEST_CASE("video ids and seeds are stable") {
  CHECK(video_id("BL01", DistortionKind::MotionBlur, 3) == "BL01_" + std::string(short_name(DistortionKind::MotionBlur)) + "_L3");
  CHECK(distortion_seed(7, 2, DistortionKind::Noise, 1) == distortion_seed(7, 2, DistortionKind::Noise, 1));
  CHECK(distortion_seed(7, 2, DistortionKind::Noise, 1) != distortion_seed(7, 2, DistortionKind::Noise, 2));
  // All smoke levels of one reference share the same plume.
  CHECK(distortion_seed(7, 2, DistortionKind::Smoke, 1) == distortion_seed(7, 2, DistortionKind::Smoke, 4));
}

TEST_CASE("generated references are deterministic and category dependent") {
  ReferenceOptions opts;
  opts.width = 64;
  opts.height = 36;
  opts.frames = 2;
  CHECK(gen_reference_clip(ContentCategory::GB, opts, 5) == gen_reference_clip(ContentCategory::GB, opts, 5));
  CHECK_FALSE(gen_reference_clip(ContentCategory::GB, opts, 5) == gen_reference_clip(ContentCategory::CU, opts, 5));
  const auto set = gen_reference_set(10, opts, 5);
  REQUIRE(set.size() == 10);
  std::set<ContentCategory> cats;
  for (const auto& r : set) cats.insert(r.category);
  CHECK(cats.size() == 10);
}
