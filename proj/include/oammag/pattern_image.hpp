#pragma once

#include <cstdint>
#include <vector>

#include "oammag/oam_state.hpp"

namespace oammag {

struct ImageGeometry {
    int width = 512;
    int height = 512;
    double center_x = 255.5;   // optic axis, pixel coordinates, fractional allowed
    double center_y = 255.5;
    double pixels_per_waist = 64.0;

    static ImageGeometry defaults() { return ImageGeometry{}; }
    void validate() const;
};

// Rasterized intensity image. valid is either empty (all pixels valid) or
// one byte per pixel; invalid pixels are excluded from correlation masks.
struct PatternImage {
    ImageGeometry geometry;
    std::vector<double> pixels;       // row-major, non-negative
    int bit_depth = 16;               // 8 or 16, serialization only
    std::vector<std::uint8_t> valid;  // empty means fully valid

    double max_pixel() const;
    bool is_valid_at(std::size_t idx) const {
        return valid.empty() || valid[idx] != 0;
    }
};

enum class NoiseKind { none, gaussian, poisson };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;          // gaussian: std dev as fraction of peak
    double peak_counts = 1000.0; // poisson: mean counts at peak intensity
    std::uint64_t seed = 0;
};

// Samples cos^2(l*(theta+alpha)) * E(r)^2 at pixel centers (2x2 average when
// supersample is set). Azimuth alpha and radius r are taken relative to the
// geometry center, r in beam-waist units.
PatternImage render(const ScalarPattern& pattern, const ImageGeometry& geometry,
                    bool supersample = false);

// Applies the configured noise; gaussian clamps at zero, poisson converts to
// counts. The per-pixel random stream depends only on (seed, pixel index).
PatternImage add_noise(const PatternImage& image, const NoiseSpec& spec);

struct AzimuthBin {
    double alpha = 0.0;  // bin-center azimuth, radians in [-pi, pi)
    double mean = 0.0;
};

// Mean intensity per azimuth bin over the annulus r_min <= r < r_max
// (waist units). Throws domain_error when the annulus holds no valid pixel.
std::vector<AzimuthBin> azimuthal_profile(const PatternImage& image,
                                          double r_min, double r_max, int n_bins);

} // namespace oammag
