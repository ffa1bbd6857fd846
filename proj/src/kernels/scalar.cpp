#include "oammag/kernels/kernels.hpp"

#include "detail.hpp"

namespace oammag::kernels::scalar {

void masked_sums(const double* a, const double* b, const unsigned char* valid,
                 std::size_t n, double& sum_a, double& sum_b, std::size_t& count) {
    double sa = 0.0, sb = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        sa += a[i];
        sb += b[i];
        ++c;
    }
    sum_a = sa;
    sum_b = sb;
    count = c;
}

void centered_moments(const double* a, const double* b, const unsigned char* valid,
                      std::size_t n, double mean_a, double mean_b,
                      double& saa, double& sbb, double& sab) {
    double aa = 0.0, bb = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        aa += da * da;
        bb += db * db;
        ab += da * db;
    }
    saa = aa;
    sbb = bb;
    sab = ab;
}

void bilinear_rotate(const double* src, int width, int height,
                     double cx, double cy, double cos_t, double sin_t,
                     double* dst, unsigned char* dst_valid) {
    const int x0_max = width - 2;
    const int y0_max = height - 2;
    for (int j = 0; j < height; ++j) {
        const double y = j - cy;
        double* out = dst + std::size_t(j) * width;
        unsigned char* out_valid = dst_valid + std::size_t(j) * width;
        for (int i = 0; i < width; ++i) {
            const double x = i - cx;
            const double xs = x * cos_t - y * sin_t + cx;
            const double ys = x * sin_t + y * cos_t + cy;
            if (detail::source_in_range(xs, ys, width, height)) {
                out[i] = detail::bilinear_sample(src, width, xs, ys, x0_max, y0_max);
                out_valid[i] = 1;
            } else {
                out[i] = 0.0;
                out_valid[i] = 0;
            }
        }
    }
}

} // namespace oammag::kernels::scalar
