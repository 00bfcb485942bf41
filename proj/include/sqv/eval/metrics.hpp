#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sqv/codec/bitstream.hpp"
#include "sqv/codec/frame.hpp"

namespace sqv::eval {

inline constexpr double kInfPsnr = std::numeric_limits<double>::infinity();

double mse(const codec::Frame& a, const codec::Frame& b);
// 10 log10(255^2 / MSE); +inf for identical frames.
double psnr(const codec::Frame& a, const codec::Frame& b);
double psnr_from_mse(double mse);
std::vector<double> psnr_per_frame(std::span<const codec::Frame> ref, std::span<const codec::Frame> test);
// PSNR of the mean MSE over all frames of all pairs.
double mean_psnr(std::span<const std::vector<codec::Frame>> ref, std::span<const std::vector<codec::Frame>> test);

// Serialized bitstream bits / (frames * width * height).
double bpp(const codec::Bitstream& bs);

// "inf" or fixed 4-decimal text.
std::string format_psnr(double db);

}  // namespace sqv::eval
