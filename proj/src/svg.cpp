#include "ogan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ogan {

namespace {

constexpr int kView = 640;
constexpr float kAxis = 1.1f;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double map_x(double v) { return (v + kAxis) / (2.0 * kAxis) * kView; }
double map_y(double v) { return kView - (v + kAxis) / (2.0 * kAxis) * kView; }

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("svg: cannot write " + path.string());
  out << body;
  if (!out) throw IoError("svg: write failed for " + path.string());
}

}  // namespace

std::string scatter_svg(const Tensor& points, const std::vector<int>& labels) {
  if (!points.empty() && (points.ndim() != 2 || points.dim(1) != 2)) {
    throw ShapeError("scatter: 2-D points required, got " + shape_str(points.shape()) +
                     " (project higher-dimensional samples first, e.g. `sample --project`)");
  }
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
       "viewBox=\"0 0 640 640\">\n";
  s += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
  // axes through the origin
  s += "<line x1=\"" + num(map_x(-kAxis)) + "\" y1=\"" + num(map_y(0)) + "\" x2=\"" +
       num(map_x(kAxis)) + "\" y2=\"" + num(map_y(0)) + "\" stroke=\"#cccccc\"/>\n";
  s += "<line x1=\"" + num(map_x(0)) + "\" y1=\"" + num(map_y(-kAxis)) + "\" x2=\"" +
       num(map_x(0)) + "\" y2=\"" + num(map_y(kAxis)) + "\" stroke=\"#cccccc\"/>\n";
  const int n = points.empty() ? 0 : points.dim(0);
  for (int i = 0; i < n; ++i) {
    const int label = i < static_cast<int>(labels.size()) ? labels[static_cast<size_t>(i)] : 0;
    const char* color = kPalette[((label % kPaletteSize) + kPaletteSize) % kPaletteSize];
    s += "<circle cx=\"" + num(map_x(points.at2(i, 0))) + "\" cy=\"" +
         num(map_y(points.at2(i, 1))) + "\" r=\"2\" fill=\"" + color + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_scatter(const Tensor& points, const std::vector<int>& labels,
                  const std::filesystem::path& path) {
  write_file(path, scatter_svg(points, labels));
}

std::string curves_svg(const std::vector<MetricsRow>& rows) {
  const char* columns[] = {"loss_E", "loss_G", "rho", "score_real", "score_fake", "std_code_real"};
  constexpr int kCols = 6;
  auto field = [](const MetricsRow& r, int c) -> float {
    switch (c) {
      case 0: return r.loss_e;
      case 1: return r.loss_g;
      case 2: return r.rho;
      case 3: return r.score_real;
      case 4: return r.score_fake;
      default: return r.std_code_real;
    }
  };

  double lo = 0.0, hi = 1.0;
  if (!rows.empty()) {
    lo = hi = field(rows[0], 0);
    for (const MetricsRow& r : rows) {
      for (int c = 0; c < kCols; ++c) {
        lo = std::min(lo, static_cast<double>(field(r, c)));
        hi = std::max(hi, static_cast<double>(field(r, c)));
      }
    }
    if (hi == lo) hi = lo + 1.0;
  }
  const double max_iter = rows.empty() ? 1.0 : static_cast<double>(rows.back().iter);

  auto px = [&](double iter) { return 40.0 + iter / max_iter * 560.0; };
  auto py = [&](double v) { return 600.0 - (v - lo) / (hi - lo) * 560.0; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
       "viewBox=\"0 0 640 640\">\n";
  s += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
  for (int c = 0; c < kCols; ++c) {
    s += "<polyline fill=\"none\" stroke=\"";
    s += kPalette[c];
    s += "\" points=\"";
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i) s += " ";
      s += num(px(static_cast<double>(rows[i].iter))) + "," + num(py(field(rows[i], c)));
    }
    s += "\"/>\n";
    s += "<text x=\"48\" y=\"" + num(20 + 16 * c) + "\" font-size=\"12\" fill=\"";
    s += kPalette[c];
    s += "\">";
    s += columns[c];
    s += "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_curves(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  write_file(path, curves_svg(rows));
}

}  // namespace ogan
