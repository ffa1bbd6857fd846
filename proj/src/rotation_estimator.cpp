#include "oammag/rotation_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oammag/errors.hpp"
#include "oammag/kernels/dispatch.hpp"
#include "oammag/units.hpp"

#include "kernels/detail.hpp"

namespace oammag {

void EstimatorConfig::validate() const {
    if (ladder.empty()) throw std::invalid_argument("EstimatorConfig: ladder is empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0))
            throw std::invalid_argument("EstimatorConfig: ladder steps must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1]))
            throw std::invalid_argument("EstimatorConfig: ladder must be strictly decreasing");
    }
    if (!(window_halfwidth > 0.0))
        throw std::invalid_argument("EstimatorConfig: window_halfwidth must be positive");
    if (!(mask_r_min >= 0.0) || !(mask_r_max > mask_r_min))
        throw std::invalid_argument("EstimatorConfig: require 0 <= mask_r_min < mask_r_max");
}

namespace {

bool same_geometry(const ImageGeometry& a, const ImageGeometry& b) {
    return a.width == b.width && a.height == b.height && a.center_x == b.center_x &&
           a.center_y == b.center_y && a.pixels_per_waist == b.pixels_per_waist;
}

std::vector<std::uint8_t> annulus_bytes(const ImageGeometry& g, const AnnulusMask& m) {
    if (!(m.r_min >= 0.0) || !(m.r_max > m.r_min))
        throw std::invalid_argument("AnnulusMask: require 0 <= r_min < r_max");
    std::vector<std::uint8_t> out(std::size_t(g.width) * g.height, 0);
    const double lo2 = m.r_min * m.r_min * g.pixels_per_waist * g.pixels_per_waist;
    const double hi2 = m.r_max * m.r_max * g.pixels_per_waist * g.pixels_per_waist;
    for (int j = 0; j < g.height; ++j) {
        const double dy = j - g.center_y;
        std::uint8_t* row = out.data() + std::size_t(j) * g.width;
        for (int i = 0; i < g.width; ++i) {
            const double dx = i - g.center_x;
            const double r2 = dx * dx + dy * dy;
            row[i] = (r2 >= lo2 && r2 <= hi2) ? 1 : 0;
        }
    }
    return out;
}

void and_mask(std::vector<std::uint8_t>& mask, const std::vector<std::uint8_t>& valid) {
    if (valid.empty()) return;
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] &= valid[i] ? 1 : 0;
}

double pearson_masked(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<std::uint8_t>& mask) {
    const auto& k = kernels::active();
    double sum_a = 0.0, sum_b = 0.0;
    std::size_t count = 0;
    k.masked_sums(a.data(), b.data(), mask.data(), mask.size(), sum_a, sum_b, count);
    if (count == 0) throw domain_error("correlation: mask selects no valid pixel");
    const double mean_a = sum_a / double(count);
    const double mean_b = sum_b / double(count);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    k.centered_moments(a.data(), b.data(), mask.data(), mask.size(), mean_a, mean_b,
                       saa, sbb, sab);
    // A constant image leaves only the rounding residue of the mean, many
    // orders below this relative floor.
    const double floor_a = 1e-18 * double(count) * mean_a * mean_a;
    const double floor_b = 1e-18 * double(count) * mean_b * mean_b;
    if (!(saa > floor_a) || !(sbb > floor_b))
        throw domain_error("correlation: image constant on mask");
    return sab / std::sqrt(saa * sbb);
}

} // namespace

PatternImage rotate_image(const PatternImage& image, double angle_deg) {
    image.geometry.validate();
    if (!std::isfinite(angle_deg))
        throw std::invalid_argument("rotate_image: angle must be finite");
    const ImageGeometry& g = image.geometry;
    const std::size_t n = std::size_t(g.width) * g.height;
    if (image.pixels.size() != n)
        throw std::invalid_argument("rotate_image: pixel count does not match geometry");
    PatternImage out;
    out.geometry = g;
    out.bit_depth = image.bit_depth;
    out.pixels.assign(n, 0.0);
    out.valid.assign(n, 0);
    // Sampling azimuth alpha + angle reproduces the pattern-angle shift of
    // the azimuthal law; with counter-clockwise alpha and downward rows the
    // kernel sees the sine negated.
    const double t = deg_to_rad(angle_deg);
    const double cos_t = std::cos(t);
    const double sin_t = -std::sin(t);
    if (image.valid.empty()) {
        kernels::active().bilinear_rotate(image.pixels.data(), g.width, g.height,
                                          g.center_x, g.center_y, cos_t, sin_t,
                                          out.pixels.data(), out.valid.data());
        return out;
    }
    // Partially valid source: any invalid pixel in the 4-tap footprint
    // invalidates the output pixel, so this path stays scalar.
    const int x0_max = g.width - 2;
    const int y0_max = g.height - 2;
    for (int j = 0; j < g.height; ++j) {
        const double y = j - g.center_y;
        double* orow = out.pixels.data() + std::size_t(j) * g.width;
        std::uint8_t* ovalid = out.valid.data() + std::size_t(j) * g.width;
        for (int i = 0; i < g.width; ++i) {
            const double x = i - g.center_x;
            const double xs = x * cos_t - y * sin_t + g.center_x;
            const double ys = x * sin_t + y * cos_t + g.center_y;
            if (!kernels::detail::source_in_range(xs, ys, g.width, g.height)) continue;
            const int x0 = int(std::min(std::max(std::floor(xs), 0.0), double(x0_max)));
            const int y0 = int(std::min(std::max(std::floor(ys), 0.0), double(y0_max)));
            const std::size_t base = std::size_t(y0) * g.width + x0;
            if (!image.valid[base] || !image.valid[base + 1] ||
                !image.valid[base + g.width] || !image.valid[base + g.width + 1])
                continue;
            orow[i] = kernels::detail::bilinear_sample(image.pixels.data(), g.width,
                                                       xs, ys, x0_max, y0_max);
            ovalid[i] = 1;
        }
    }
    return out;
}

double correlation(const PatternImage& a, const PatternImage& b,
                   const AnnulusMask& mask) {
    if (!same_geometry(a.geometry, b.geometry))
        throw std::invalid_argument("correlation: images have different geometry");
    const std::size_t n = std::size_t(a.geometry.width) * a.geometry.height;
    if (a.pixels.size() != n || b.pixels.size() != n)
        throw std::invalid_argument("correlation: pixel count does not match geometry");
    std::vector<std::uint8_t> m = annulus_bytes(a.geometry, mask);
    and_mask(m, a.valid);
    and_mask(m, b.valid);
    return pearson_masked(a.pixels, b.pixels, m);
}

CorrelationCurve correlation_curve(const PatternImage& reference,
                                   const PatternImage& target,
                                   const std::vector<double>& angles,
                                   const AnnulusMask& mask) {
    if (angles.empty())
        throw std::invalid_argument("correlation_curve: angles is empty");
    CorrelationCurve curve;
    curve.step = angles.size() > 1 ? angles[1] - angles[0] : 0.0;
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
        const double d = angles[i + 1] - angles[i];
        if (!(d > 0.0) || std::abs(d - curve.step) > 1e-9 * std::max(1.0, std::abs(curve.step)))
            throw std::invalid_argument("correlation_curve: angles must be a uniform increasing grid");
    }
    curve.angles = angles;
    curve.scores.reserve(angles.size());
    for (double a : angles)
        curve.scores.push_back(correlation(rotate_image(reference, a), target, mask));
    return curve;
}

namespace {

// Index of the best score, lowest index winning ties.
std::size_t argmax(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

} // namespace

RotationEstimate estimate_rotation(const PatternImage& reference,
                                   const PatternImage& target,
                                   const EstimatorConfig& config, int l) {
    config.validate();
    if (l == 0) throw std::invalid_argument("estimate_rotation: l must be nonzero");
    if (!same_geometry(reference.geometry, target.geometry))
        throw std::invalid_argument("estimate_rotation: images have different geometry");
    const double period = 180.0 / std::abs(l);
    const std::size_t m = std::size_t(std::ceil(period / config.ladder[0] - 1e-9));
    if (m < 8)
        throw std::invalid_argument("estimate_rotation: ladder[0] too coarse for the symmetry period");

    std::vector<std::uint8_t> base =
        annulus_bytes(reference.geometry, {config.mask_r_min, config.mask_r_max});
    and_mask(base, target.valid);

    std::vector<std::uint8_t> joint;
    auto scan = [&](const std::vector<double>& angles, double step) {
        CorrelationCurve curve;
        curve.step = step;
        curve.angles = angles;
        curve.scores.reserve(angles.size());
        for (double a : angles) {
            const PatternImage rot = rotate_image(reference, a);
            joint = base;
            and_mask(joint, rot.valid);
            curve.scores.push_back(pearson_masked(rot.pixels, target.pixels, joint));
        }
        return curve;
    };

    // Stage 1: one full symmetry period, half-open so the wrap point is not
    // sampled twice.
    std::vector<double> angles(m);
    for (std::size_t i = 0; i < m; ++i)
        angles[i] = -0.5 * period + double(i) * config.ladder[0];
    CorrelationCurve curve = scan(angles, config.ladder[0]);
    std::size_t best = argmax(curve.scores);

    // A genuine rival peak (degenerate symmetric input) sits well away from
    // the best bin; neighbors within two bins belong to the same peak.
    double rival = -2.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t d = i > best ? i - best : best - i;
        const std::size_t circ = std::min(d, m - d);
        if (circ >= 3) rival = std::max(rival, curve.scores[i]);
    }
    if (rival > -2.0 && curve.scores[best] - rival < 1e-6)
        throw domain_error("estimate_rotation: ambiguous peak");

    double center = curve.angles[best];
    for (std::size_t stage = 1; stage < config.ladder.size(); ++stage) {
        const double step = config.ladder[stage];
        const double window = config.window_halfwidth * config.ladder[stage - 1];
        const int half = std::max(1, int(std::lround(window / step)));
        std::vector<double> grid(2 * half + 1);
        for (int i = -half; i <= half; ++i)
            grid[std::size_t(i + half)] = center + double(i) * step;
        curve = scan(grid, step);
        best = argmax(curve.scores);
        center = curve.angles[best];
    }

    RotationEstimate est;
    est.peak_score = curve.scores[best];
    est.curve_finest = curve;
    double angle = center;
    if (config.refine && best > 0 && best + 1 < curve.scores.size()) {
        const double yl = curve.scores[best - 1];
        const double ym = curve.scores[best];
        const double yr = curve.scores[best + 1];
        const double denom = yl - 2.0 * ym + yr;
        if (denom < 0.0) {
            const double offset = std::clamp(0.5 * (yl - yr) / denom, -0.5, 0.5);
            angle += offset * curve.step;
        }
    }
    est.angle = principal_angle(angle, l);
    return est;
}

std::vector<double> unwrap_sequence(const std::vector<double>& angles_deg, int l) {
    if (l == 0) throw std::invalid_argument("unwrap_sequence: l must be nonzero");
    std::vector<double> out;
    out.reserve(angles_deg.size());
    const double period = 180.0 / std::abs(l);
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
        if (i == 0) {
            out.push_back(angles_deg[0]);
            continue;
        }
        const double d = angles_deg[i] - out.back();
        const double k = std::round(d / period);
        out.push_back(angles_deg[i] - k * period);
    }
    return out;
}

double principal_angle(double angle_deg, int l) {
    if (l == 0) throw std::invalid_argument("principal_angle: l must be nonzero");
    const double period = 180.0 / std::abs(l);
    const double k = std::ceil(angle_deg / period - 0.5);
    return angle_deg - k * period;
}

} // namespace oammag
