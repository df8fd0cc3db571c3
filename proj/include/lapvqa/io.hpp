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

#ifndef LAPVQA_IO_HPP
#define LAPVQA_IO_HPP

#include "lapvqa/image.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lapvqa {

enum class ClipFormat { Y4m, PngDir };

/// Plane layout used when writing Y4M.
///
/// Rgb444 stores R, G, B as the three 4:4:4 planes and tags the header with
/// `XCOLORSPACE=RGB`; it is the only lossless choice and the default.
/// Yuv444 and Yuv420 emit ordinary BT.601 full-range streams for other tools.
enum class Y4mLayout { Rgb444, Yuv444, Yuv420 };

enum class IoErrc {
  NotFound,
  MalformedHeader,
  InconsistentFrameSize,
  TruncatedStream,
  EmptyClip,
  WriteFailed,
};

std::string_view to_string(IoErrc code);

class IoError : public std::runtime_error {
public:
  IoError(IoErrc code, const std::string& what);
  IoErrc code() const { return code_; }

private:
  IoErrc code_;
};

/// PNG directories carry no timing, so `png_fps` is assigned on read.
VideoClip read_clip(const std::filesystem::path& path, ClipFormat format,
                    FrameRate png_fps = {});

void write_clip(const VideoClip& clip, const std::filesystem::path& path, ClipFormat format,
                Y4mLayout layout = Y4mLayout::Rgb444);

/// `.y4m` files are Y4M, directories are PNG frame directories.
ClipFormat detect_format(const std::filesystem::path& path);

/// `frame_%06d.png`, 1-based.
std::string png_frame_name(std::size_t index_one_based);

/// Writes via a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

std::string read_text(const std::filesystem::path& path);

}  // namespace lapvqa

#endif  // LAPVQA_IO_HPP
