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

#include <png.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace lapvqa {

std::string_view to_string(IoErrc code) {
  switch (code) {
    case IoErrc::NotFound: return "not found";
    case IoErrc::MalformedHeader: return "malformed header";
    case IoErrc::InconsistentFrameSize: return "inconsistent frame size";
    case IoErrc::TruncatedStream: return "truncated stream";
    case IoErrc::EmptyClip: return "empty clip";
    case IoErrc::WriteFailed: return "write failed";
  }
  return "unknown";
}

IoError::IoError(IoErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

enum class Chroma { C420, C422, C444, Mono };

struct Y4mHeader {
  int width = 0;
  int height = 0;
  FrameRate fps;
  Chroma chroma = Chroma::C420;
  bool rgb = false;
};

int parse_int(std::string_view s, const fs::path& path) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

Y4mHeader parse_y4m_header(const std::string& line, const fs::path& path) {
  std::istringstream ss(line);
  std::string token;
  ss >> token;
  if (token != "YUV4MPEG2") {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": missing YUV4MPEG2 magic");
  }
  Y4mHeader h;
  while (ss >> token) {
    const char tag = token[0];
    const std::string_view value = std::string_view(token).substr(1);
    switch (tag) {
      case 'W': h.width = parse_int(value, path); break;
      case 'H': h.height = parse_int(value, path); break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) {
          throw IoError(IoErrc::MalformedHeader, path.string() + ": bad frame rate");
        }
        h.fps.num = parse_int(value.substr(0, colon), path);
        h.fps.den = parse_int(value.substr(colon + 1), path);
        if (h.fps.num <= 0 || h.fps.den <= 0) {
          throw IoError(IoErrc::MalformedHeader, path.string() + ": non-positive frame rate");
        }
        break;
      }
      case 'C':
        if (value.starts_with("420")) h.chroma = Chroma::C420;
        else if (value.starts_with("422")) h.chroma = Chroma::C422;
        else if (value == "444") h.chroma = Chroma::C444;
        else if (value == "mono") h.chroma = Chroma::Mono;
        else throw IoError(IoErrc::MalformedHeader, path.string() + ": unsupported colorspace C" + std::string(value));
        break;
      case 'X':
        if (value == "COLORSPACE=RGB") h.rgb = true;
        break;
      case 'I':
      case 'A':
        break;
      default:
        throw IoError(IoErrc::MalformedHeader, path.string() + ": unknown header tag '" + token + "'");
    }
  }
  if (h.width < kMinFrameSide || h.height < kMinFrameSide) {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": missing or too small W/H");
  }
  if (h.rgb && h.chroma != Chroma::C444) {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": RGB planes require C444");
  }
  return h;
}

struct ChromaDims {
  int cw, ch;
  int sx, sy;  // subsampling shifts
};

ChromaDims chroma_dims(const Y4mHeader& h) {
  switch (h.chroma) {
    case Chroma::C420: return {(h.width + 1) / 2, (h.height + 1) / 2, 1, 1};
    case Chroma::C422: return {(h.width + 1) / 2, h.height, 1, 0};
    case Chroma::C444: return {h.width, h.height, 0, 0};
    case Chroma::Mono: return {0, 0, 0, 0};
  }
  return {0, 0, 0, 0};
}

std::uint8_t clamp_round(double v) { return quantize(v); }

Frame decode_y4m_frame(const Y4mHeader& h, const std::vector<std::uint8_t>& buf) {
  Frame frame(h.width, h.height);
  auto px = frame.pixels();
  const std::size_t luma_size = static_cast<std::size_t>(h.width) * h.height;
  if (h.rgb) {
    for (std::size_t i = 0; i < luma_size; ++i) {
      px[3 * i] = buf[i];
      px[3 * i + 1] = buf[luma_size + i];
      px[3 * i + 2] = buf[2 * luma_size + i];
    }
    return frame;
  }
  const ChromaDims cd = chroma_dims(h);
  const std::uint8_t* y_plane = buf.data();
  const std::uint8_t* cb_plane = buf.data() + luma_size;
  const std::uint8_t* cr_plane = cb_plane + static_cast<std::size_t>(cd.cw) * cd.ch;
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      const double luma = y_plane[static_cast<std::size_t>(y) * h.width + x];
      double cb = 0.0, cr = 0.0;
      if (h.chroma != Chroma::Mono) {
        const std::size_t ci = static_cast<std::size_t>(y >> cd.sy) * cd.cw + (x >> cd.sx);
        cb = cb_plane[ci] - 128.0;
        cr = cr_plane[ci] - 128.0;
      }
      std::uint8_t* p = &px[(static_cast<std::size_t>(y) * h.width + x) * 3];
      p[0] = clamp_round(luma + 1.402 * cr);
      p[1] = clamp_round(luma - 0.344136 * cb - 0.714136 * cr);
      p[2] = clamp_round(luma + 1.772 * cb);
    }
  }
  return frame;
}

VideoClip read_y4m(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrc::NotFound, path.string());
  std::string header_line;
  if (!std::getline(in, header_line) || in.eof()) {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": no header line");
  }
  const Y4mHeader h = parse_y4m_header(header_line, path);
  const ChromaDims cd = chroma_dims(h);
  const std::size_t frame_bytes =
      static_cast<std::size_t>(h.width) * h.height + 2 * static_cast<std::size_t>(cd.cw) * cd.ch;

  std::vector<Frame> frames;
  std::vector<std::uint8_t> buf(frame_bytes);
  std::string frame_line;
  while (std::getline(in, frame_line)) {
    if (!frame_line.starts_with("FRAME")) {
      throw IoError(IoErrc::MalformedHeader,
                    path.string() + ": expected FRAME marker before frame " + std::to_string(frames.size() + 1));
    }
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(frame_bytes));
    if (static_cast<std::size_t>(in.gcount()) != frame_bytes) {
      throw IoError(IoErrc::TruncatedStream,
                    path.string() + ": frame " + std::to_string(frames.size() + 1) + " is short");
    }
    frames.push_back(decode_y4m_frame(h, buf));
  }
  if (frames.empty()) throw IoError(IoErrc::EmptyClip, path.string() + ": no frames");
  return VideoClip(std::move(frames), h.fps);
}

void encode_y4m_frame(const Frame& f, Y4mLayout layout, std::vector<std::uint8_t>& out) {
  const int w = f.width(), hgt = f.height();
  const std::size_t n = static_cast<std::size_t>(w) * hgt;
  const auto px = f.pixels();
  if (layout == Y4mLayout::Rgb444) {
    out.resize(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = px[3 * i];
      out[n + i] = px[3 * i + 1];
      out[2 * n + i] = px[3 * i + 2];
    }
    return;
  }
  std::vector<double> cb(n), cr(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = px[3 * i], g = px[3 * i + 1], b = px[3 * i + 2];
    y[i] = clamp_round(kLumaR * r + kLumaG * g + kLumaB * b);
    cb[i] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    cr[i] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  }
  out.assign(y.begin(), y.end());
  if (layout == Y4mLayout::Yuv444) {
    for (double v : cb) out.push_back(clamp_round(v));
    for (double v : cr) out.push_back(clamp_round(v));
    return;
  }
  const int cw = (w + 1) / 2, ch = (hgt + 1) / 2;
  auto subsample = [&](const std::vector<double>& plane) {
    for (int cy = 0; cy < ch; ++cy) {
      for (int cx = 0; cx < cw; ++cx) {
        double sum = 0.0;
        int count = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int x = 2 * cx + dx, yy = 2 * cy + dy;
            if (x < w && yy < hgt) {
              sum += plane[static_cast<std::size_t>(yy) * w + x];
              ++count;
            }
          }
        }
        out.push_back(clamp_round(sum / count));
      }
    }
  };
  subsample(cb);
  subsample(cr);
}

void write_y4m(const VideoClip& clip, const fs::path& path, Y4mLayout layout) {
  write_file_atomic(path, [&](std::ostream& os) {
    os << "YUV4MPEG2 W" << clip.width() << " H" << clip.height() << " F" << clip.fps().num << ':'
       << clip.fps().den << " Ip A1:1";
    switch (layout) {
      case Y4mLayout::Rgb444: os << " C444 XCOLORSPACE=RGB"; break;
      case Y4mLayout::Yuv444: os << " C444"; break;
      case Y4mLayout::Yuv420: os << " C420jpeg"; break;
    }
    os << '\n';
    std::vector<std::uint8_t> buf;
    for (const auto& f : clip.frames()) {
      encode_y4m_frame(f, layout, buf);
      os << "FRAME\n";
      os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
  });
}

bool is_png_frame_name(const std::string& name) {
  if (name.size() != 16 || !name.starts_with("frame_") || !name.ends_with(".png")) return false;
  return std::all_of(name.begin() + 6, name.begin() + 12, [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<fs::path> list_png_frames(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png_frame_name(entry.path().filename().string())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IoError(IoErrc::MalformedHeader, path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width < kMinFrameSide || image.height < kMinFrameSide) {
    png_image_free(&image);
    throw IoError(IoErrc::MalformedHeader, path.string() + ": frame smaller than 3x3");
  }
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(IoErrc::TruncatedStream, path.string() + ": " + msg);
  }
  return Frame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(pixels));
}

void write_png(const Frame& frame, const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = PNG_FORMAT_RGB;
  const fs::path tmp = path.string() + ".tmp";
  if (!png_image_write_to_file(&image, tmp.string().c_str(), 0, frame.pixels().data(), 0, nullptr)) {
    throw IoError(IoErrc::WriteFailed, path.string() + ": " + image.message);
  }
  fs::rename(tmp, path);
}

VideoClip read_png_dir(const fs::path& dir, FrameRate fps) {
  if (!fs::is_directory(dir)) throw IoError(IoErrc::NotFound, dir.string());
  const auto files = list_png_frames(dir);
  if (files.empty()) throw IoError(IoErrc::EmptyClip, dir.string() + ": no frame_NNNNNN.png files");
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    Frame frame = read_png(f);
    if (!frames.empty() &&
        (frame.width() != frames.front().width() || frame.height() != frames.front().height())) {
      throw IoError(IoErrc::InconsistentFrameSize, f.string() + " differs from " + files.front().string());
    }
    frames.push_back(std::move(frame));
  }
  return VideoClip(std::move(frames), fps);
}

void write_png_dir(const VideoClip& clip, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoErrc::WriteFailed, dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < clip.size(); ++i) {
    write_png(clip.frame(i), dir / png_frame_name(i + 1));
  }
  // Stale frames from a longer earlier clip would otherwise be read back.
  for (const auto& f : list_png_frames(dir)) {
    if (f.filename().string() > png_frame_name(clip.size())) fs::remove(f);
  }
}

}  // namespace

VideoClip read_clip(const fs::path& path, ClipFormat format, FrameRate png_fps) {
  if (!fs::exists(path)) throw IoError(IoErrc::NotFound, path.string());
  return format == ClipFormat::Y4m ? read_y4m(path) : read_png_dir(path, png_fps);
}

void write_clip(const VideoClip& clip, const fs::path& path, ClipFormat format, Y4mLayout layout) {
  if (clip.empty()) throw IoError(IoErrc::EmptyClip, path.string() + ": refusing to write an empty clip");
  if (format == ClipFormat::Y4m) write_y4m(clip, path, layout);
  else write_png_dir(clip, path);
}

ClipFormat detect_format(const fs::path& path) {
  if (fs::is_directory(path)) return ClipFormat::PngDir;
  if (path.extension() == ".y4m") return ClipFormat::Y4m;
  throw IoError(IoErrc::NotFound, path.string() + ": neither a .y4m file nor a directory");
}

std::string png_frame_name(std::size_t index_one_based) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.png", index_one_based);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp" + std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(IoErrc::WriteFailed, tmp.string());
    writer(os);
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp);
      throw IoError(IoErrc::WriteFailed, path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError(IoErrc::WriteFailed, path.string() + ": " + ec.message());
  }
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, [&](std::ostream& os) { os.write(text.data(), static_cast<std::streamsize>(text.size())); });
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrc::NotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lapvqa
