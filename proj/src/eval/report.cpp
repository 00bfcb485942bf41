#include "sqv/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqv/common/error.hpp"
#include "sqv/eval/metrics.hpp"

namespace sqv::eval {

std::string rd_csv(const std::vector<QualityPoint>& pts) {
  std::string out = "quality,bpp,psnr\n";
  char buf[96];
  for (const QualityPoint& q : pts) {
    std::snprintf(buf, sizeof buf, "%d,%.9f,%s\n", q.quality, q.point.bpp, format_psnr(q.point.psnr).c_str());
    out += buf;
  }
  return out;
}

std::vector<QualityPoint> parse_rd_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<QualityPoint> pts;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("quality", 0) == 0) continue;
    }
    QualityPoint q;
    char bpp[64], psnr[64];
    if (std::sscanf(line.c_str(), "%d,%63[^,],%63s", &q.quality, bpp, psnr) != 3) {
      throw FormatError("bad RD CSV line " + std::to_string(lineno) + ": " + line);
    }
    try {
      q.point.bpp = std::stod(bpp);
      q.point.psnr = std::string(psnr) == "inf" ? kInfPsnr : std::stod(psnr);
    } catch (const std::exception&) {
      throw FormatError("bad number on RD CSV line " + std::to_string(lineno));
    }
    pts.push_back(q);
  }
  return pts;
}

RDCurve curve_of(const std::vector<QualityPoint>& pts) {
  RDCurve c;
  for (const auto& q : pts) c.push_back(q.point);
  return c;
}

std::string per_frame_csv(const std::vector<double>& psnr) {
  std::string out = "frame,psnr_db\n";
  for (std::size_t i = 0; i < psnr.size(); ++i) out += std::to_string(i) + "," + format_psnr(psnr[i]) + "\n";
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string svg_line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto cap = [](double y) { return std::isinf(y) ? (y > 0 ? kPlotPsnrCap : 0.0) : y; };
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, cap(y));
      y1 = std::max(y1, cap(y));
    }
  if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
  if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (cap(y) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  o += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    o += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  o += "<text x=\"" + num((L + W - R) / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" + escape(x_label) +
       "</text>\n";
  o += "<text x=\"16\" y=\"" + num((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((T + H - B) / 2) + ")\">" + escape(y_label) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 6];
    std::string pts;
    for (auto [x, y] : series[k].points) pts += num(px(x)) + "," + num(py(y)) + " ";
    o += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const double ly = T + 16 * static_cast<double>(k);
    o += "<line x1=\"" + num(W - R + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(W - R + 30) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + c + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(W - R + 34) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[k].name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + p.string());
  out << text;
  if (!out) throw FormatError("write failed for " + p.string());
}

}  // namespace sqv::eval
