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

// Developer tool: prints the video-level classifier indices of every distorted
// clip in a small in-memory synthetic corpus as CSV, for threshold tuning.

#include "lapvqa/classify.hpp"
#include "lapvqa/refgen.hpp"
#include "lapvqa/pipeline.hpp"
#include "lapvqa/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"Dump classifier indices over a synthetic corpus"};
  int refs = 10;
  int frames = 8;
  int width = 512;
  int height = 288;
  std::uint64_t seed = 2024;
  bool pristine = false;
  std::string ref_dir;
  int stride = 1;
  app.add_option("--refs", refs);
  app.add_option("--frames", frames);
  app.add_option("--width", width);
  app.add_option("--height", height);
  app.add_option("--seed", seed);
  app.add_flag("--pristine", pristine, "also score the reference clips");
  app.add_option("--ref-dir", ref_dir, "only score the pristine clips found in this directory");
  app.add_option("--stride", stride, "frame stride used with --ref-dir");
  CLI11_PARSE(app, argc, argv);

  using namespace lapvqa;
  const ReferenceOptions opts{width, height, frames, {25, 1}};
  const auto references = ref_dir.empty() ? gen_reference_set(refs, opts, seed) : std::vector<ReferenceVideo>{};
  const auto levels = LevelTable::defaults();
  const auto thresholds = ClassifierThresholds::defaults();
  std::printf("ref,kind,level,pbi,p_smoke,sigma_n,lmr,anisotropy,decision\n");
  auto emit = [&](const std::string& ref, std::string_view kind, int level, const VideoClip& clip) {
    const auto r = classify_video(clip, thresholds);
    const auto& v = r.video;
    std::printf("%s,%.*s,%d,%.4f,%.4f,%.4f,%.4f,%.4f,%s\n", ref.c_str(), int(kind.size()), kind.data(), level,
                v.pbi, v.p_smoke, v.sigma_n, v.lmr, v.anisotropy,
                r.decision ? std::string(to_string(*r.decision)).c_str() : "None");
    std::fflush(stdout);
  };
  if (!ref_dir.empty()) {
    for (const auto& r : open_references(ref_dir)) emit(r.label, "Pristine", 0, every_nth_frame(r.load(), stride));
    return 0;
  }
  for (std::size_t i = 0; i < references.size(); ++i) {
    const VideoClip ref = references[i].load();
    if (pristine) emit(references[i].label, "Pristine", 0, ref);
    for (DistortionKind k : kAllKinds) {
      for (int l = 1; l <= kLevelCount; ++l) {
        emit(references[i].label, to_string(k), l,
             apply_distortion(ref, levels.spec(k, l), distortion_seed(seed, i, k, l)));
      }
    }
  }
  return 0;
}
