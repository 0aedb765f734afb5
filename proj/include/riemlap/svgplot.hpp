#pragma once

#include <functional>
#include <string>

#include "riemlap/types.hpp"

namespace riemlap {

/// Scatter plot of 2D samples over log-density contours, written as SVG.
/// Contours are marching-squares polylines on a fixed 200 x 200 grid with 8
/// levels placed at density quantiles of the grid values. Throws for
/// non-2D sample matrices.
std::string render_scatter_svg(const Mat& samples,
                               const std::function<double(const Vec&)>& log_density);

void plot_samples_svg(const std::string& out_path, const Mat& samples,
                      const std::function<double(const Vec&)>& log_density);

}  // namespace riemlap
