#include "riemlap/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "riemlap/io.hpp"

namespace riemlap {

namespace {

constexpr int kGrid = 200;
constexpr int kLevels = 8;
constexpr double kCanvas = 640.0;
constexpr double kMargin = 40.0;

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kCanvas - 2 * kMargin); }
  double sy(double y) const {
    return kCanvas - kMargin - (y - y0) / (y1 - y0) * (kCanvas - 2 * kMargin);
  }
};

void append(std::string& svg, const char* fmt, double a, double b, double c, double d) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  svg += buf;
}

}  // namespace

std::string render_scatter_svg(const Mat& samples,
                               const std::function<double(const Vec&)>& log_density) {
  if (samples.cols() != 2)
    throw std::invalid_argument("render_scatter_svg: only 2D targets can be plotted");

  Frame fr;
  fr.x0 = samples.col(0).minCoeff();
  fr.x1 = samples.col(0).maxCoeff();
  fr.y0 = samples.col(1).minCoeff();
  fr.y1 = samples.col(1).maxCoeff();
  const double padx = 0.1 * std::max(fr.x1 - fr.x0, 1e-6);
  const double pady = 0.1 * std::max(fr.y1 - fr.y0, 1e-6);
  fr.x0 -= padx; fr.x1 += padx;
  fr.y0 -= pady; fr.y1 += pady;

  // density on the grid
  std::vector<double> f(kGrid * kGrid);
  Vec th(2);
  for (int iy = 0; iy < kGrid; ++iy) {
    for (int ix = 0; ix < kGrid; ++ix) {
      th[0] = fr.x0 + (fr.x1 - fr.x0) * ix / (kGrid - 1);
      th[1] = fr.y0 + (fr.y1 - fr.y0) * iy / (kGrid - 1);
      f[iy * kGrid + ix] = std::exp(log_density(th));
    }
  }
  std::vector<double> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> levels(kLevels);
  for (int k = 0; k < kLevels; ++k) {
    const double q = static_cast<double>(k + 1) / (kLevels + 1);
    levels[k] = sorted[static_cast<size_t>(q * (sorted.size() - 1))];
  }

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  char head[160];
  std::snprintf(head, sizeof(head),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                kCanvas, kCanvas, kCanvas, kCanvas);
  svg += head;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // marching squares, one segment group per level
  auto gx = [&](int ix) { return fr.x0 + (fr.x1 - fr.x0) * ix / (kGrid - 1); };
  auto gy = [&](int iy) { return fr.y0 + (fr.y1 - fr.y0) * iy / (kGrid - 1); };
  for (double level : levels) {
    svg += "<g stroke=\"#555555\" stroke-width=\"0.7\" fill=\"none\">\n";
    for (int iy = 0; iy + 1 < kGrid; ++iy) {
      for (int ix = 0; ix + 1 < kGrid; ++ix) {
        const double v00 = f[iy * kGrid + ix], v10 = f[iy * kGrid + ix + 1];
        const double v01 = f[(iy + 1) * kGrid + ix], v11 = f[(iy + 1) * kGrid + ix + 1];
        int mask = (v00 > level) | ((v10 > level) << 1) | ((v11 > level) << 2) |
                   ((v01 > level) << 3);
        if (mask == 0 || mask == 15) continue;
        auto interp = [level](double a, double b, double pa, double pb) {
          const double t = (level - a) / (b - a);
          return pa + t * (pb - pa);
        };
        // edge crossing points (bottom, right, top, left)
        double px[4], py[4];
        bool has[4] = {false, false, false, false};
        if ((v00 > level) != (v10 > level)) {
          px[0] = interp(v00, v10, gx(ix), gx(ix + 1)); py[0] = gy(iy); has[0] = true;
        }
        if ((v10 > level) != (v11 > level)) {
          px[1] = gx(ix + 1); py[1] = interp(v10, v11, gy(iy), gy(iy + 1)); has[1] = true;
        }
        if ((v01 > level) != (v11 > level)) {
          px[2] = interp(v01, v11, gx(ix), gx(ix + 1)); py[2] = gy(iy + 1); has[2] = true;
        }
        if ((v00 > level) != (v01 > level)) {
          px[3] = gx(ix); py[3] = interp(v00, v01, gy(iy), gy(iy + 1)); has[3] = true;
        }
        int pts[4], np = 0;
        for (int e = 0; e < 4; ++e)
          if (has[e]) pts[np++] = e;
        // join crossing points pairwise (ambiguous saddles drawn as two segments)
        for (int p = 0; p + 1 < np; p += 2) {
          append(svg, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n",
                 fr.sx(px[pts[p]]), fr.sy(py[pts[p]]), fr.sx(px[pts[p + 1]]),
                 fr.sy(py[pts[p + 1]]));
        }
      }
    }
    svg += "</g>\n";
  }

  svg += "<g fill=\"#1f77b4\" fill-opacity=\"0.5\">\n";
  for (int i = 0; i < samples.rows(); ++i) {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\"/>\n",
                  fr.sx(samples(i, 0)), fr.sy(samples(i, 1)));
    svg += buf;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void plot_samples_svg(const std::string& out_path, const Mat& samples,
                      const std::function<double(const Vec&)>& log_density) {
  write_text_file(out_path, render_scatter_svg(samples, log_density));
}

}  // namespace riemlap
