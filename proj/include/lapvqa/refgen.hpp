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

#ifndef LAPVQA_REFGEN_HPP
#define LAPVQA_REFGEN_HPP

#include "lapvqa/image.hpp"
#include "lapvqa/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lapvqa {

// Procedural stand-ins for pristine laparoscopic reference clips: textured
// tissue with vessels, metallic instruments, specular highlights, slow camera
// drift and mild sensor noise. Each content category gets its own palette,
// texture scale and instrument set.

struct ReferenceOptions {
  int width = 512;
  int height = 288;
  int frames = 250;
  FrameRate fps{25, 1};
};

VideoClip gen_reference_clip(ContentCategory category, const ReferenceOptions& options, std::uint64_t seed);

/// One reference per category, labelled `<CODE>01`, `<CODE>02`, ...
std::vector<ReferenceVideo> gen_reference_set(int count, const ReferenceOptions& options, std::uint64_t seed);

}  // namespace lapvqa

#endif  // LAPVQA_REFGEN_HPP
