#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sqv/eval/bd.hpp"

namespace sqv::eval {

struct QualityPoint {
  int quality = 0;
  RDPoint point;
};

// quality,bpp,psnr
std::string rd_csv(const std::vector<QualityPoint>& pts);
std::vector<QualityPoint> parse_rd_csv(const std::string& text);
RDCurve curve_of(const std::vector<QualityPoint>& pts);

// frame,psnr_db
std::string per_frame_csv(const std::vector<double>& psnr);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

inline constexpr double kPlotPsnrCap = 99.99;

// Minimal standalone SVG line chart; infinite y values are drawn at the cap.
std::string svg_line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);

}  // namespace sqv::eval
