#include "oammag/pattern_image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oammag/counter_rng.hpp"
#include "oammag/errors.hpp"
#include "oammag/units.hpp"

namespace oammag {

void ImageGeometry::validate() const {
    if (width < 16 || height < 16)
        throw std::invalid_argument("ImageGeometry: width and height must be >= 16");
    if (!(pixels_per_waist > 0.0))
        throw std::invalid_argument("ImageGeometry: pixels_per_waist must be positive");
    if (!(center_x >= 0.0) || !(center_x <= width - 1.0) || !(center_y >= 0.0) ||
        !(center_y <= height - 1.0))
        throw std::invalid_argument("ImageGeometry: center must lie inside the image");
}

double PatternImage::max_pixel() const {
    double m = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i)
        if (is_valid_at(i)) m = std::max(m, pixels[i]);
    return m;
}

PatternImage render(const ScalarPattern& pattern, const ImageGeometry& geometry,
                    bool supersample) {
    geometry.validate();
    if (pattern.l == 0) throw std::invalid_argument("render: l must be nonzero");
    PatternImage img;
    img.geometry = geometry;
    img.pixels.assign(std::size_t(geometry.width) * geometry.height, 0.0);
    // Azimuth increases counter-clockwise viewed with y upward, so image
    // rows (downward) enter with a flipped sign.
    auto sample = [&](double px, double py) {
        const double x = (px - geometry.center_x) / geometry.pixels_per_waist;
        const double y = (geometry.center_y - py) / geometry.pixels_per_waist;
        const double r = std::hypot(x, y);
        const double alpha = std::atan2(y, x);
        return intensity_at(pattern, r, alpha);
    };
    for (int j = 0; j < geometry.height; ++j) {
        double* row = img.pixels.data() + std::size_t(j) * geometry.width;
        for (int i = 0; i < geometry.width; ++i) {
            if (supersample) {
                // 2x2 subpixel average at offsets +-0.25.
                row[i] = 0.25 * (sample(i - 0.25, j - 0.25) + sample(i + 0.25, j - 0.25) +
                                 sample(i - 0.25, j + 0.25) + sample(i + 0.25, j + 0.25));
            } else {
                row[i] = sample(double(i), double(j));
            }
        }
    }
    return img;
}

PatternImage add_noise(const PatternImage& image, const NoiseSpec& spec) {
    if (spec.kind == NoiseKind::none) return image;
    PatternImage out = image;
    if (spec.kind == NoiseKind::gaussian) {
        const std::uint64_t key = stream_key(spec.seed, 0);
        if (!(spec.sigma >= 0.0))
            throw std::invalid_argument("add_noise: sigma must be non-negative");
        const double scale = spec.sigma * image.max_pixel();
        for (std::size_t i = 0; i < out.pixels.size(); ++i) {
            const double z = unit_gaussian(key, i);
            out.pixels[i] = std::max(0.0, out.pixels[i] + scale * z);
        }
        return out;
    }
    // poisson: intensities become expected counts at peak_counts per unit peak.
    if (!(spec.peak_counts > 0.0))
        throw std::invalid_argument("add_noise: peak_counts must be positive");
    const double peak = image.max_pixel();
    const double to_counts = peak > 0.0 ? spec.peak_counts / peak : 0.0;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const double mean = out.pixels[i] * to_counts;
        out.pixels[i] = poisson_draw(mean, stream_key(spec.seed, i + 1));
    }
    return out;
}

std::vector<AzimuthBin> azimuthal_profile(const PatternImage& image,
                                          double r_min, double r_max, int n_bins) {
    image.geometry.validate();
    if (n_bins < 8) throw std::invalid_argument("azimuthal_profile: n_bins must be >= 8");
    if (!(r_min >= 0.0) || !(r_max > r_min))
        throw std::invalid_argument("azimuthal_profile: require 0 <= r_min < r_max");
    const ImageGeometry& g = image.geometry;
    std::vector<double> sum(n_bins, 0.0);
    std::vector<std::size_t> cnt(n_bins, 0);
    for (int j = 0; j < g.height; ++j) {
        for (int i = 0; i < g.width; ++i) {
            const std::size_t idx = std::size_t(j) * g.width + i;
            if (!image.is_valid_at(idx)) continue;
            const double x = (i - g.center_x) / g.pixels_per_waist;
            const double y = (g.center_y - j) / g.pixels_per_waist;
            const double r = std::hypot(x, y);
            if (r < r_min || r >= r_max) continue;
            const double alpha = std::atan2(y, x);
            int b = int(std::floor((alpha + pi) / (2.0 * pi) * n_bins));
            b = std::clamp(b, 0, n_bins - 1);
            sum[b] += image.pixels[idx];
            ++cnt[b];
        }
    }
    std::size_t total = 0;
    for (std::size_t c : cnt) total += c;
    if (total == 0) throw domain_error("azimuthal_profile: annulus holds no valid pixel");
    std::vector<AzimuthBin> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        out[b].alpha = -pi + (b + 0.5) * (2.0 * pi / n_bins);
        out[b].mean = cnt[b] ? sum[b] / double(cnt[b]) : 0.0;
    }
    return out;
}

} // namespace oammag
