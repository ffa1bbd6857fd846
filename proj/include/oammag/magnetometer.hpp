#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oammag/nmor_model.hpp"

namespace oammag {

enum class CalibrationMethod { offset_slope, full_inversion, symmetry_fit };

struct CalibrationResult {
    double B_background = 0.0;  // Gauss
    double uncertainty = 0.0;   // Gauss
    CalibrationMethod method = CalibrationMethod::offset_slope;
    double residual = 0.0;      // RMS of fit residuals in degrees (symmetry_fit)

    // Flat key = value text report.
    std::string report() const;
};

struct SweepPoint {
    double coil_gauss = 0.0;   // field equivalent of the coil setting
    double theta_deg = 0.0;    // measured pattern rotation
};

struct FieldSweepRecord {
    std::vector<SweepPoint> points;
};

// CSV with header "coil_gauss,theta_deg".
void write_sweep_csv(const FieldSweepRecord& record, const std::string& path);
FieldSweepRecord read_sweep_csv(const std::string& path);

// First positive stationary point of theta(B); the rotation curve is
// invertible on (-B, +B).
double monotone_branch_limit(const MediumParams& params);

// Unique B on the monotone branch with rotation_angle(B) = theta, to
// 1e-7 Gauss. Throws domain_error("outside monotone branch") when |theta|
// reaches the branch endpoint value.
double invert_theta(double theta_rad, const MediumParams& params);

// Field resolution angle_accuracy / |d(theta)/dB| at the operating point,
// in Gauss (angle_accuracy in degrees). Throws domain_error near the branch
// endpoint where the derivative vanishes.
double precision(double angle_accuracy_deg, const MediumParams& params, double at_B);

// Background field from the pattern angle measured at zero coil current.
// offset_slope divides by the weak-field slope magnitude (or the override,
// in degrees per Gauss); full_inversion solves the rotation curve.
CalibrationResult calibrate_offset(double theta_deg, const MediumParams& params,
                                   CalibrationMethod method,
                                   std::optional<double> slope_override_deg_per_gauss = {},
                                   double angle_accuracy_deg = 0.045);

// Least-squares fit of measured_theta ~ s * theta(coil - B0) over (B0, s),
// golden-section over B0 with the optimal scale in closed form per candidate.
// Uncertainty comes from the local curvature of the profiled loss.
CalibrationResult fit_symmetry_center(const FieldSweepRecord& data,
                                      const MediumParams& params);

} // namespace oammag
