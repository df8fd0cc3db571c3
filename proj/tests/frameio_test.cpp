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

#include "lapvqa/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>

using namespace lapvqa;
using lapvqa::test::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary);
  os << bytes;
}

IoErrc error_code_of(const std::filesystem::path& p, ClipFormat f) {
  try {
    read_clip(p, f);
  } catch (const IoError& e) {
    return e.code();
  }
  FAIL("read_clip accepted a broken file");
  return IoErrc::WriteFailed;
}

}  // namespace

TEST_CASE("luma uses full-range BT.601 weights") {
  Frame f(3, 3);
  f.fill(255, 255, 255);
  f.at(1, 1, 0) = 255;
  f.at(1, 1, 1) = 0;
  f.at(1, 1, 2) = 0;
  f.at(0, 0, 0) = f.at(0, 0, 1) = f.at(0, 0, 2) = 0;
  const LumaPlane y = to_luma(f);
  CHECK(y(2, 2) == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(y(0, 0) == 0.0);
  CHECK(y(1, 1) == doctest::Approx(76.245).epsilon(1e-12));
}

TEST_CASE("luma is bounded and monotone in every channel") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 500; ++trial) {
    Frame f(3, 3);
    for (auto& v : f.pixels()) v = static_cast<std::uint8_t>(byte(rng));
    const LumaPlane y = to_luma(f);
    CHECK(y.minCoeff() >= 0.0);
    CHECK(y.maxCoeff() <= 255.0 + 1e-9);
    const int c = trial % 3;
    if (f.at(0, 0, c) < 255) {
      Frame g = f;
      ++g.at(0, 0, c);
      CHECK(to_luma(g)(0, 0) > y(0, 0));
    }
  }
}

TEST_CASE("frames reject sizes below the noise mask footprint") {
  CHECK_THROWS_AS(Frame(2, 8), std::invalid_argument);
  CHECK_THROWS_AS(Frame(8, 2), std::invalid_argument);
  CHECK_THROWS_AS(Frame(4, 4, std::vector<std::uint8_t>(10)), std::invalid_argument);
  CHECK_NOTHROW(Frame(3, 3));
}

TEST_CASE("clips reject mixed frame sizes") {
  std::vector<Frame> frames{Frame(4, 4), Frame(5, 4)};
  CHECK_THROWS_AS(VideoClip{frames}, std::invalid_argument);
}

TEST_CASE("two black PNG frames read back as an all-zero clip") {
  TempDir dir("png-black");
  const VideoClip clip({Frame(8, 8), Frame(8, 8)});
  write_clip(clip, dir / "clip", ClipFormat::PngDir);
  const VideoClip back = read_clip(dir / "clip", ClipFormat::PngDir);
  REQUIRE(back.size() == 2);
  for (const auto& f : back.frames()) {
    CHECK(f.width() == 8);
    for (auto v : f.pixels()) CHECK(v == 0);
  }
}

TEST_CASE("a one-frame PNG clip is stored as frame_000001.png") {
  TempDir dir("png-one");
  write_clip(VideoClip({test::textured_frame(9, 7, 1)}), dir / "clip", ClipFormat::PngDir);
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir / "clip")) names.push_back(e.path().filename().string());
  REQUIRE(names.size() == 1);
  CHECK(names.front() == "frame_000001.png");
  CHECK(png_frame_name(12) == "frame_000012.png");
}

TEST_CASE("round trips are bit exact for both formats") {
  TempDir dir("roundtrip");
  const VideoClip clip(
      {test::textured_frame(33, 17, 5), test::textured_frame(33, 17, 6), test::textured_frame(33, 17, 7)},
      FrameRate{30000, 1001});
  SUBCASE("y4m") {
    write_clip(clip, dir / "a.y4m", ClipFormat::Y4m);
    const VideoClip back = read_clip(dir / "a.y4m", ClipFormat::Y4m);
    CHECK(back == clip);
    write_clip(back, dir / "b.y4m", ClipFormat::Y4m);
    CHECK(read_text(dir / "a.y4m") == read_text(dir / "b.y4m"));
  }
  SUBCASE("png") {
    write_clip(clip, dir / "p", ClipFormat::PngDir);
    const VideoClip back = read_clip(dir / "p", ClipFormat::PngDir, FrameRate{30000, 1001});
    CHECK(back == clip);
  }
}

TEST_CASE("y4m header dimensions and frame rate are honoured") {
  TempDir dir("y4m-header");
  const VideoClip clip({test::textured_frame(512, 288, 1)}, FrameRate{25, 1});
  write_clip(clip, dir / "c.y4m", ClipFormat::Y4m);
  const std::string text = read_text(dir / "c.y4m");
  CHECK(text.starts_with("YUV4MPEG2 W512 H288 F25:1"));
  const VideoClip back = read_clip(dir / "c.y4m", ClipFormat::Y4m);
  CHECK(back.width() == 512);
  CHECK(back.height() == 288);
  CHECK(back.fps() == FrameRate{25, 1});
}

TEST_CASE("4:2:0 input is upsampled nearest-neighbour and converted with BT.601") {
  TempDir dir("y4m-420");
  // 4x4 luma, 2x2 chroma. Neutral chroma means grey pixels equal to luma.
  std::string bytes = "YUV4MPEG2 W4 H4 F25:1 C420jpeg\nFRAME\n";
  for (int i = 0; i < 16; ++i) bytes.push_back(static_cast<char>(16 * i));
  bytes.append(4, static_cast<char>(128));
  bytes.append(4, static_cast<char>(128));
  write_bytes(dir / "g.y4m", bytes);
  const VideoClip clip = read_clip(dir / "g.y4m", ClipFormat::Y4m);
  REQUIRE(clip.size() == 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int c = 0; c < 3; ++c) CHECK(clip.frame(0).at(x, y, c) == 16 * (4 * y + x));
    }
  }

  // Saturated chroma in one quadrant only touches that 2x2 block.
  std::string red = "YUV4MPEG2 W4 H4 F25:1 C420jpeg\nFRAME\n";
  red.append(16, static_cast<char>(128));
  red += std::string{static_cast<char>(128), static_cast<char>(128), static_cast<char>(128), static_cast<char>(128)};
  red += std::string{static_cast<char>(228), static_cast<char>(128), static_cast<char>(128), static_cast<char>(128)};
  write_bytes(dir / "r.y4m", red);
  const Frame f = read_clip(dir / "r.y4m", ClipFormat::Y4m).frame(0);
  // R = Y + 1.402 (Cr - 128) = 128 + 140.2 -> clamps to 255; G = 128 - 0.714136 * 100.
  CHECK(f.at(0, 0, 0) == 255);
  CHECK(f.at(1, 1, 1) == 57);
  CHECK(f.at(2, 0, 0) == 128);
  CHECK(f.at(3, 3, 0) == 128);
}

TEST_CASE("each kind of broken input gets its own error") {
  TempDir dir("broken");
  write_bytes(dir / "magic.y4m", "NOTY4M W4 H4\nFRAME\n");
  CHECK(error_code_of(dir / "magic.y4m", ClipFormat::Y4m) == IoErrc::MalformedHeader);

  write_bytes(dir / "short.y4m", "YUV4MPEG2 W4 H4 F25:1 C444\nFRAME\n" + std::string(20, 'x'));
  CHECK(error_code_of(dir / "short.y4m", ClipFormat::Y4m) == IoErrc::TruncatedStream);

  write_bytes(dir / "empty.y4m", "YUV4MPEG2 W4 H4 F25:1 C444\n");
  CHECK(error_code_of(dir / "empty.y4m", ClipFormat::Y4m) == IoErrc::EmptyClip);

  CHECK(error_code_of(dir / "missing.y4m", ClipFormat::Y4m) == IoErrc::NotFound);

  write_clip(VideoClip({Frame(8, 8)}), dir / "mixed", ClipFormat::PngDir);
  write_clip(VideoClip({Frame(9, 8)}), dir / "other", ClipFormat::PngDir);
  std::filesystem::copy_file(dir / "other" / "frame_000001.png", dir / "mixed" / "frame_000002.png");
  CHECK(error_code_of(dir / "mixed", ClipFormat::PngDir) == IoErrc::InconsistentFrameSize);
}

TEST_CASE("writing an empty clip is refused") {
  TempDir dir("empty-write");
  CHECK_THROWS_AS(write_clip(VideoClip{}, dir / "x.y4m", ClipFormat::Y4m), IoError);
  CHECK_FALSE(std::filesystem::exists(dir / "x.y4m"));
}

TEST_CASE("format detection follows the path") {
  TempDir dir("detect");
  write_clip(VideoClip({Frame(4, 4)}), dir / "a.y4m", ClipFormat::Y4m);
  write_clip(VideoClip({Frame(4, 4)}), dir / "b", ClipFormat::PngDir);
  CHECK(detect_format(dir / "a.y4m") == ClipFormat::Y4m);
  CHECK(detect_format(dir / "b") == ClipFormat::PngDir);
}
