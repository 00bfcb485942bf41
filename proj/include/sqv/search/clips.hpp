#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sqv/codec/frame.hpp"

namespace sqv::search {

enum class MotionKind : std::uint8_t { static_scene, pan, noise };
const char* motion_name(MotionKind k);

struct ClipSpec {
  bool synthetic = true;
  MotionKind kind = MotionKind::noise;
  std::uint64_t seed = 0;
  int frames = 8;
  int width = 64;
  int height = 64;
  std::filesystem::path path;  // file sources

  std::string str() const;
};

// "synthetic:<static|pan|noise>:<seed>[:<W>x<H>[:<frames>]]" or a path.
ClipSpec parse_clip_spec(std::string_view text);

using Clip = std::vector<codec::Frame>;

// Deterministic synthetic clips built from hashed lattice values and plain
// arithmetic:
//   static  one smooth periodic pattern repeated
//   pan     that pattern moved right by one pixel per frame, wrapping around
//   noise   a smooth value-noise field that drifts over time plus fine grain
Clip gen_synthetic_clip(const ClipSpec& spec);
Clip load_clip(const ClipSpec& spec);

// Calibration: 8 clips x 8 frames at 64x64; held-out test: 4 clips, other seeds.
std::vector<ClipSpec> default_calibration_specs();
std::vector<ClipSpec> default_test_specs();
std::vector<Clip> load_clips(const std::vector<ClipSpec>& specs);

}  // namespace sqv::search
