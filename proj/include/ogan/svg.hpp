#ifndef OGAN_SVG_HPP
#define OGAN_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ogan/tensor.hpp"
#include "ogan/trainer.hpp"

namespace ogan {

/// Scatter plot of 2-D points in a fixed 640x640 viewport with axis range
/// [-1.1, 1.1], one color per label. Byte output is deterministic for
/// identical input. labels may be empty (single color).
std::string scatter_svg(const Tensor& points, const std::vector<int>& labels);

void emit_scatter(const Tensor& points, const std::vector<int>& labels,
                  const std::filesystem::path& path);

/// Training-curve plot: one polyline per metric column against iteration.
std::string curves_svg(const std::vector<MetricsRow>& rows);

void emit_curves(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

}  // namespace ogan

#endif  // OGAN_SVG_HPP
