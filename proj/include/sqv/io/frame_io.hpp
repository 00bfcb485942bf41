#pragma once

#include <filesystem>
#include <vector>

#include "sqv/codec/frame.hpp"

namespace sqv::io {

codec::Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const codec::Frame& f);

// Every *.pgm in the directory, sorted by file name.
std::vector<codec::Frame> read_pgm_dir(const std::filesystem::path& dir);
// frame_0000.pgm, frame_0001.pgm, ...
void write_pgm_dir(const std::filesystem::path& dir, const std::vector<codec::Frame>& frames);

// Luma plane of each frame of a YUV4MPEG2 file (C420*, C422, C444, Cmono).
std::vector<codec::Frame> read_y4m(const std::filesystem::path& path);
// Writes a Cmono stream.
void write_y4m(const std::filesystem::path& path, const std::vector<codec::Frame>& frames);

// Dispatches on the path: directory of PGMs, .y4m, or a single .pgm.
std::vector<codec::Frame> load_frames(const std::filesystem::path& path);

}  // namespace sqv::io
