#include "sqv/search/clips.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "sqv/common/error.hpp"
#include "sqv/common/rng.hpp"
#include "sqv/io/frame_io.hpp"

namespace sqv::search {

const char* motion_name(MotionKind k) {
  switch (k) {
    case MotionKind::static_scene: return "static";
    case MotionKind::pan: return "pan";
    case MotionKind::noise: return "noise";
  }
  return "?";
}

std::string ClipSpec::str() const {
  if (!synthetic) return path.string();
  return std::string("synthetic:") + motion_name(kind) + ":" + std::to_string(seed) + ":" + std::to_string(width) +
         "x" + std::to_string(height) + ":" + std::to_string(frames);
}

namespace {

template <class T>
T number(std::string_view s, std::string_view whole) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad number '" + std::string(s) + "' in clip spec '" + std::string(whole) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

ClipSpec parse_clip_spec(std::string_view text) {
  ClipSpec c;
  if (!text.starts_with("synthetic:")) {
    c.synthetic = false;
    c.path = std::string(text);
    return c;
  }
  auto parts = split(text, ':');
  if (parts.size() < 3 || parts.size() > 5) throw ConfigError("clip spec must be synthetic:<kind>:<seed>[:WxH[:frames]]");
  if (parts[1] == "static") c.kind = MotionKind::static_scene;
  else if (parts[1] == "pan") c.kind = MotionKind::pan;
  else if (parts[1] == "noise") c.kind = MotionKind::noise;
  else throw ConfigError("unknown clip kind '" + std::string(parts[1]) + "' (static, pan, noise)");
  c.seed = number<std::uint64_t>(parts[2], text);
  if (parts.size() >= 4) {
    auto wh = split(parts[3], 'x');
    if (wh.size() != 2) throw ConfigError("clip size must be WxH in '" + std::string(text) + "'");
    c.width = number<int>(wh[0], text);
    c.height = number<int>(wh[1], text);
  }
  if (parts.size() == 5) c.frames = number<int>(parts[4], text);
  return c;
}

namespace {

double smoothstep(double f) { return f * f * (3.0 - 2.0 * f); }

// Periodic value noise: lattice values from (seed, cell, layer), smoothstep
// bilinear interpolation, wrap at the frame size.
struct Lattice {
  std::uint64_t seed;
  int cell, nx, ny;

  double value(int i, int j, std::uint64_t layer) const {
    i = ((i % nx) + nx) % nx;
    j = ((j % ny) + ny) % ny;
    return static_cast<double>(hash3(seed, static_cast<std::uint64_t>(j * nx + i), layer) & 0xFF) / 255.0;
  }

  double at(int x, int y, std::uint64_t layer) const {
    const int i = x / cell, j = y / cell;
    const double fx = smoothstep(static_cast<double>(x % cell) / cell);
    const double fy = smoothstep(static_cast<double>(y % cell) / cell);
    const double a = value(i, j, layer), b = value(i + 1, j, layer);
    const double c = value(i, j + 1, layer), d = value(i + 1, j + 1, layer);
    return (a + (b - a) * fx) + ((c + (d - c) * fx) - (a + (b - a) * fx)) * fy;
  }
};

std::uint8_t to_sample(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

}  // namespace

Clip gen_synthetic_clip(const ClipSpec& spec) {
  if (!spec.synthetic) throw ConfigError("gen_synthetic_clip: not a synthetic spec");
  codec::check_frame_dims(spec.width, spec.height);
  if (spec.frames < 1 || spec.frames > 0xFFFF) throw ConfigError("clip frame count must be in 1..65535");
  const int w = spec.width, h = spec.height;
  const Lattice coarse{hash3(spec.seed, 1, 0), 16, w / 16, h / 16};
  const Lattice fine{hash3(spec.seed, 2, 0), 4, w / 4, h / 4};

  Clip clip;
  if (spec.kind != MotionKind::noise) {
    codec::Frame base(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) base.at(x, y) = to_sample(40.0 + 150.0 * coarse.at(x, y, 0) + 30.0 * fine.at(x, y, 0));
    for (int t = 0; t < spec.frames; ++t) {
      if (spec.kind == MotionKind::static_scene) {
        clip.push_back(base);
        continue;
      }
      codec::Frame f(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.at(x, y) = base.at(((x - t) % w + w) % w, y);
      clip.push_back(std::move(f));
    }
    return clip;
  }

  // Time is interpolated between lattice layers four frames apart.
  const Lattice drift{hash3(spec.seed, 3, 0), 8, w / 8, h / 8};
  for (int t = 0; t < spec.frames; ++t) {
    const auto k = static_cast<std::uint64_t>(t / 4);
    const double ft = smoothstep(static_cast<double>(t % 4) / 4.0);
    codec::Frame f(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double m = drift.at(x, y, k) + (drift.at(x, y, k + 1) - drift.at(x, y, k)) * ft;
        const double grain = static_cast<double>(hash3(spec.seed ^ 0x6a11, static_cast<std::uint64_t>(y * w + x),
                                                       static_cast<std::uint64_t>(t)) % 13) - 6.0;
        f.at(x, y) = to_sample(30.0 + 120.0 * coarse.at(x, y, 0) + 70.0 * m + grain);
      }
    }
    clip.push_back(std::move(f));
  }
  return clip;
}

Clip load_clip(const ClipSpec& spec) {
  if (spec.synthetic) return gen_synthetic_clip(spec);
  return io::load_frames(spec.path);
}

std::vector<ClipSpec> default_calibration_specs() {
  std::vector<ClipSpec> out;
  const MotionKind kinds[] = {MotionKind::noise, MotionKind::pan, MotionKind::static_scene, MotionKind::noise};
  for (int i = 0; i < 8; ++i) {
    ClipSpec c;
    c.kind = kinds[i % 4];
    c.seed = 1000 + static_cast<std::uint64_t>(i);
    out.push_back(c);
  }
  return out;
}

std::vector<ClipSpec> default_test_specs() {
  std::vector<ClipSpec> out;
  const MotionKind kinds[] = {MotionKind::noise, MotionKind::pan, MotionKind::noise, MotionKind::static_scene};
  for (int i = 0; i < 4; ++i) {
    ClipSpec c;
    c.kind = kinds[i];
    c.seed = 2000 + static_cast<std::uint64_t>(i);
    out.push_back(c);
  }
  return out;
}

std::vector<Clip> load_clips(const std::vector<ClipSpec>& specs) {
  std::vector<Clip> out;
  for (const auto& s : specs) out.push_back(load_clip(s));
  return out;
}

}  // namespace sqv::search
