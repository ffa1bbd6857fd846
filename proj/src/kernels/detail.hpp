#pragma once

#include <algorithm>
#include <cmath>

// Shared per-pixel arithmetic for the resampling kernels. Both translation
// units compile with contraction off, so keeping the operation order identical
// here makes the scalar and vector backends agree bit for bit per pixel.
namespace oammag::kernels::detail {

inline bool source_in_range(double xs, double ys, int width, int height) {
    return xs >= 0.0 && ys >= 0.0 && xs <= double(width - 1) && ys <= double(height - 1);
}

inline double bilinear_sample(const double* src, int width, double xs, double ys,
                              int x0_max, int y0_max) {
    const double x0d = std::min(std::max(std::floor(xs), 0.0), double(x0_max));
    const double y0d = std::min(std::max(std::floor(ys), 0.0), double(y0_max));
    const double fx = xs - x0d;
    const double fy = ys - y0d;
    const int x0 = int(x0d);
    const int y0 = int(y0d);
    const double* row0 = src + std::size_t(y0) * width + x0;
    const double* row1 = row0 + width;
    const double top = (1.0 - fx) * row0[0] + fx * row0[1];
    const double bot = (1.0 - fx) * row1[0] + fx * row1[1];
    return (1.0 - fy) * top + fy * bot;
}

} // namespace oammag::kernels::detail
