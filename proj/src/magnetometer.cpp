#include "oammag/magnetometer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "oammag/errors.hpp"
#include "oammag/root_find.hpp"
#include "oammag/units.hpp"

namespace oammag {

namespace {

const char* method_name(CalibrationMethod m) {
    switch (m) {
        case CalibrationMethod::offset_slope: return "offset_slope";
        case CalibrationMethod::full_inversion: return "full_inversion";
        case CalibrationMethod::symmetry_fit: return "symmetry_fit";
    }
    return "unknown";
}

} // namespace

std::string CalibrationResult::report() const {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "B_background_gauss = " << B_background << "\n";
    out << "uncertainty_gauss = " << uncertainty << "\n";
    out << "method = " << method_name(method) << "\n";
    out << "residual_deg = " << residual << "\n";
    return out.str();
}

void write_sweep_csv(const FieldSweepRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("sweep csv: cannot open '" + path + "' for writing");
    out << "coil_gauss,theta_deg\n" << std::setprecision(17);
    for (const SweepPoint& p : record.points)
        out << p.coil_gauss << "," << p.theta_deg << "\n";
    if (!out) throw io_error("sweep csv: write to '" + path + "' failed");
}

FieldSweepRecord read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("sweep csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error("sweep csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "coil_gauss,theta_deg")
        throw io_error("sweep csv: unexpected header '" + line + "'");
    FieldSweepRecord rec;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw io_error("sweep csv: missing comma on line " + std::to_string(lineno));
        SweepPoint p;
        try {
            std::size_t used = 0;
            p.coil_gauss = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing");
            const std::string rest = line.substr(comma + 1);
            p.theta_deg = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw io_error("sweep csv: bad number on line " + std::to_string(lineno));
        }
        rec.points.push_back(p);
    }
    return rec;
}

double monotone_branch_limit(const MediumParams& params) {
    const std::vector<Extremum> ext = find_extrema(params);
    for (const Extremum& e : ext)
        if (e.B > 0.0) return e.B;
    throw domain_error("monotone_branch_limit: no positive stationary point");
}

double invert_theta(double theta_rad, const MediumParams& params) {
    params.validate();
    if (theta_rad == 0.0) return 0.0;
    const double B_mono = monotone_branch_limit(params);
    const double theta_limit = std::abs(rotation_angle(B_mono, params));
    if (!(std::abs(theta_rad) < theta_limit))
        throw domain_error("invert_theta: outside monotone branch");
    auto f = [&](double B) { return rotation_angle(B, params) - theta_rad; };
    return brent_root(f, -B_mono, B_mono, 1e-7);
}

double precision(double angle_accuracy_deg, const MediumParams& params, double at_B) {
    params.validate();
    if (!(angle_accuracy_deg > 0.0))
        throw std::invalid_argument("precision: angle_accuracy must be positive");
    const double B_mono = monotone_branch_limit(params);
    if (std::abs(at_B) >= B_mono)
        throw domain_error("precision: insensitive operating point");
    const double h = 1e-4;
    const double deriv_deg =
        rad_to_deg(rotation_angle(at_B + h, params) - rotation_angle(at_B - h, params)) /
        (2.0 * h);
    if (std::abs(deriv_deg) < 1e-12)
        throw domain_error("precision: insensitive operating point");
    return angle_accuracy_deg / std::abs(deriv_deg);
}

CalibrationResult calibrate_offset(double theta_deg, const MediumParams& params,
                                   CalibrationMethod method,
                                   std::optional<double> slope_override_deg_per_gauss,
                                   double angle_accuracy_deg) {
    params.validate();
    if (!std::isfinite(theta_deg))
        throw std::invalid_argument("calibrate_offset: theta must be finite");
    CalibrationResult res;
    res.method = method;
    if (method == CalibrationMethod::offset_slope) {
        const double slope_mag = std::abs(
            slope_override_deg_per_gauss ? *slope_override_deg_per_gauss
                                         : weak_field_slope(params));
        if (!(slope_mag > 0.0))
            throw std::invalid_argument("calibrate_offset: slope must be nonzero");
        res.B_background = theta_deg / slope_mag;
        res.uncertainty = angle_accuracy_deg / slope_mag;
        return res;
    }
    if (method == CalibrationMethod::full_inversion) {
        // Measured angles follow the positive-slope sign convention, opposite
        // to the literal dispersion curve; oddness makes the flip exact.
        res.B_background = invert_theta(-deg_to_rad(theta_deg), params);
        res.uncertainty = precision(angle_accuracy_deg, params, res.B_background);
        return res;
    }
    throw std::invalid_argument(
        "calibrate_offset: method must be offset_slope or full_inversion");
}

CalibrationResult fit_symmetry_center(const FieldSweepRecord& data,
                                      const MediumParams& params) {
    params.validate();
    const std::size_t n = data.points.size();
    if (n < 5)
        throw std::invalid_argument("fit_symmetry_center: need at least 5 points");
    double coil_lo = data.points[0].coil_gauss, coil_hi = coil_lo;
    double th_lo = data.points[0].theta_deg, th_hi = th_lo;
    for (const SweepPoint& p : data.points) {
        coil_lo = std::min(coil_lo, p.coil_gauss);
        coil_hi = std::max(coil_hi, p.coil_gauss);
        th_lo = std::min(th_lo, p.theta_deg);
        th_hi = std::max(th_hi, p.theta_deg);
    }
    const double th_scale = std::max(std::abs(th_lo), std::abs(th_hi));
    if (th_hi - th_lo <= 1e-12 * std::max(1.0, th_scale))
        throw domain_error("fit_symmetry_center: degenerate sweep (constant theta)");
    if (!(coil_hi > coil_lo))
        throw domain_error("fit_symmetry_center: degenerate sweep (single coil value)");

    // Profiled least squares: for a candidate center the optimal gain is
    // closed-form, leaving a 1-D loss in B0.
    auto loss_and_scale = [&](double B0) {
        double mt = 0.0, tt = 0.0, mm = 0.0;
        for (const SweepPoint& p : data.points) {
            const double t = rad_to_deg(rotation_angle(p.coil_gauss - B0, params));
            mt += p.theta_deg * t;
            tt += t * t;
            mm += p.theta_deg * p.theta_deg;
        }
        const double s = tt > 0.0 ? mt / tt : 0.0;
        return std::pair<double, double>(mm - 2.0 * s * mt + s * s * tt, s);
    };
    auto loss = [&](double B0) { return loss_and_scale(B0).first; };

    const double span = coil_hi - coil_lo;
    const double lo = coil_lo - 0.25 * span;
    const double hi = coil_hi + 0.25 * span;
    const int grid = 400;
    double best_B0 = lo, best_L = loss(lo);
    for (int i = 1; i <= grid; ++i) {
        const double B0 = lo + (hi - lo) * double(i) / grid;
        const double L = loss(B0);
        if (L < best_L) {
            best_L = L;
            best_B0 = B0;
        }
    }
    const double cell = (hi - lo) / grid;
    const double B0 = golden_min(loss, best_B0 - cell, best_B0 + cell, 1e-7);
    const auto [L_min, s_opt] = loss_and_scale(B0);

    CalibrationResult res;
    res.method = CalibrationMethod::symmetry_fit;
    res.B_background = B0;
    res.residual = std::sqrt(std::max(0.0, L_min) / double(n));

    // Curvature of the profiled loss: chi-square increases by one at
    // dB^2 = 2 sigma^2 / L'' with sigma^2 estimated from the residuals.
    const double h = std::max(1e-3, 1e-3 * span);
    const double L2 = loss(B0 + h) - 2.0 * L_min + loss(B0 - h);
    const double curvature = L2 / (h * h);
    const double sigma2 = std::max(0.0, L_min) / double(n > 2 ? n - 2 : 1);
    res.uncertainty = curvature > 0.0 ? std::sqrt(2.0 * sigma2 / curvature) : 0.0;
    return res;
}

} // namespace oammag
