#include "sqv/io/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "sqv/common/error.hpp"

namespace sqv::io {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// PNM header token, skipping whitespace and # comments.
std::string token(const std::vector<std::uint8_t>& d, std::size_t& pos, const fs::path& p) {
  for (;;) {
    while (pos < d.size() && std::isspace(d[pos])) ++pos;
    if (pos < d.size() && d[pos] == '#') {
      while (pos < d.size() && d[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string t;
  while (pos < d.size() && !std::isspace(d[pos])) t.push_back(static_cast<char>(d[pos++]));
  if (t.empty()) throw FormatError("truncated PGM header in " + p.string());
  return t;
}

int to_int(const std::string& t, const fs::path& p) {
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      t.size() > 6) {
    throw FormatError("bad number '" + t + "' in " + p.string());
  }
  return std::stoi(t);
}

}  // namespace

codec::Frame read_pgm(const fs::path& path) {
  const auto d = slurp(path);
  std::size_t pos = 0;
  if (token(d, pos, path) != "P5") throw FormatError(path.string() + " is not a binary PGM (P5)");
  const int w = to_int(token(d, pos, path), path);
  const int h = to_int(token(d, pos, path), path);
  const int maxv = to_int(token(d, pos, path), path);
  if (maxv != 255) throw FormatError(path.string() + ": only 8-bit PGM (maxval 255) is supported");
  if (w <= 0 || h <= 0) throw FormatError(path.string() + ": empty image");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (d.size() < pos + n) throw FormatError("truncated PGM data in " + path.string());
  return codec::Frame(w, h, std::vector<std::uint8_t>(d.begin() + static_cast<std::ptrdiff_t>(pos),
                                                      d.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

void write_pgm(const fs::path& path, const codec::Frame& f) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << f.width << ' ' << f.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(f.samples.data()), static_cast<std::streamsize>(f.samples.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

std::vector<codec::Frame> read_pgm_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw FormatError("no .pgm frames in " + dir.string());
  std::vector<codec::Frame> frames;
  for (const auto& f : files) frames.push_back(read_pgm(f));
  return frames;
}

void write_pgm_dir(const fs::path& dir, const std::vector<codec::Frame>& frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", i);
    write_pgm(dir / name, frames[i]);
  }
}

std::vector<codec::Frame> read_y4m(const fs::path& path) {
  const auto d = slurp(path);
  auto eol = std::find(d.begin(), d.end(), '\n');
  if (eol == d.end()) throw FormatError("truncated Y4M header in " + path.string());
  std::istringstream hdr(std::string(d.begin(), eol));
  std::string tag;
  hdr >> tag;
  if (tag != "YUV4MPEG2") throw FormatError(path.string() + " is not a YUV4MPEG2 file");
  int w = 0, h = 0;
  std::string colour = "420";
  while (hdr >> tag) {
    if (tag[0] == 'W') w = to_int(tag.substr(1), path);
    if (tag[0] == 'H') h = to_int(tag.substr(1), path);
    if (tag[0] == 'C') colour = tag.substr(1);
  }
  if (w <= 0 || h <= 0) throw FormatError(path.string() + ": missing W/H in Y4M header");
  const std::size_t luma = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::size_t chroma;
  if (colour.rfind("420", 0) == 0) {
    chroma = 2 * (static_cast<std::size_t>((w + 1) / 2) * static_cast<std::size_t>((h + 1) / 2));
  } else if (colour.rfind("422", 0) == 0) {
    chroma = 2 * (static_cast<std::size_t>((w + 1) / 2) * static_cast<std::size_t>(h));
  } else if (colour.rfind("444", 0) == 0) {
    chroma = 2 * luma;
  } else if (colour.rfind("mono", 0) == 0) {
    chroma = 0;
  } else {
    throw FormatError(path.string() + ": unsupported Y4M colour space C" + colour);
  }
  std::vector<codec::Frame> frames;
  std::size_t pos = static_cast<std::size_t>(eol - d.begin()) + 1;
  while (pos < d.size()) {
    auto start = d.begin() + static_cast<std::ptrdiff_t>(pos);
    auto fe = std::find(start, d.end(), '\n');
    if (fe == d.end() || std::string(start, fe).rfind("FRAME", 0) != 0) {
      throw FormatError("bad FRAME marker in " + path.string());
    }
    pos = static_cast<std::size_t>(fe - d.begin()) + 1;
    if (d.size() < pos + luma + chroma) throw FormatError("truncated Y4M frame in " + path.string());
    frames.emplace_back(w, h, std::vector<std::uint8_t>(d.begin() + static_cast<std::ptrdiff_t>(pos),
                                                        d.begin() + static_cast<std::ptrdiff_t>(pos + luma)));
    pos += luma + chroma;
  }
  if (frames.empty()) throw FormatError(path.string() + " holds no frames");
  return frames;
}

void write_y4m(const fs::path& path, const std::vector<codec::Frame>& frames) {
  if (frames.empty()) throw FormatError("write_y4m: no frames");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "YUV4MPEG2 W" << frames[0].width << " H" << frames[0].height << " F25:1 Ip A1:1 Cmono\n";
  for (const auto& f : frames) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.samples.data()), static_cast<std::streamsize>(f.samples.size()));
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

std::vector<codec::Frame> load_frames(const fs::path& path) {
  if (fs::is_directory(path)) return read_pgm_dir(path);
  if (path.extension() == ".y4m") return read_y4m(path);
  if (path.extension() == ".pgm") return {read_pgm(path)};
  throw FormatError("don't know how to read frames from " + path.string());
}

}  // namespace sqv::io
