#pragma once

#include <vector>

#include "oammag/pattern_image.hpp"

namespace oammag {

struct CorrelationCurve {
    std::vector<double> angles;  // degrees, strictly increasing, uniform spacing
    std::vector<double> scores;  // Pearson correlation per angle
    double step = 0.0;           // degrees
};

struct EstimatorConfig {
    // Coarse-to-fine scan step sizes, degrees, strictly decreasing.
    std::vector<double> ladder{4.5, 0.45, 0.045, 0.0045};
    // Each refinement stage scans +/- window_halfwidth * previous step.
    double window_halfwidth = 2.0;
    // Correlation annulus, beam-waist units.
    double mask_r_min = 0.25;
    double mask_r_max = 3.0;
    // Parabolic peak interpolation through the three finest samples.
    bool refine = false;

    void validate() const;
};

struct RotationEstimate {
    double angle = 0.0;       // degrees, principal value in (-90/|l|, +90/|l|]
    double peak_score = 0.0;
    CorrelationCurve curve_finest;
};

// Annulus in beam-waist units, evaluated against an image geometry.
struct AnnulusMask {
    double r_min = 0.25;
    double r_max = 3.0;
};

// Resamples the image under a rotation by angle_deg about the geometry
// center (bilinear); pixels whose source footprint leaves the image are
// marked invalid.
PatternImage rotate_image(const PatternImage& image, double angle_deg);

// Pearson correlation of the two images over the annulus, restricted to
// pixels valid in both. Throws domain_error when the masked region is empty
// or either image is constant on it.
double correlation(const PatternImage& a, const PatternImage& b,
                   const AnnulusMask& mask);

// scores[i] = correlation(rotate_image(reference, angles[i]), target, mask).
// angles must be a uniform, strictly increasing grid.
CorrelationCurve correlation_curve(const PatternImage& reference,
                                   const PatternImage& target,
                                   const std::vector<double>& angles,
                                   const AnnulusMask& mask);

// Coarse-to-fine correlation scan: stage 1 covers one full symmetry period
// 180/|l| degrees, later stages shrink around the running best. Ties resolve
// to the lowest angle. Throws domain_error("ambiguous peak") when the two
// best stage-1 peaks are indistinguishable.
RotationEstimate estimate_rotation(const PatternImage& reference,
                                   const PatternImage& target,
                                   const EstimatorConfig& config, int l);

// Adds multiples of the symmetry period 180/|l| so consecutive differences
// stay below half a period; the first element is unchanged.
std::vector<double> unwrap_sequence(const std::vector<double>& angles_deg, int l);

// Wraps an angle into the principal interval (-90/|l|, +90/|l|] degrees.
double principal_angle(double angle_deg, int l);

} // namespace oammag
