#include "oammag/nmor_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oammag/errors.hpp"
#include "oammag/root_find.hpp"
#include "oammag/units.hpp"

namespace oammag {

MediumParams& MediumParams::with_gamma_ratio(double ratio) {
    if (ratio <= 0.0) throw std::invalid_argument("with_gamma_ratio: ratio must be positive");
    gamma = ratio * Gamma;
    return *this;
}

double MediumParams::rabi_frequency() const {
    return std::sqrt(kappa2 * Gamma * gamma);
}

void MediumParams::validate() const {
    if (Gamma <= 0.0) throw std::invalid_argument("MediumParams: Gamma must be positive");
    if (gamma <= 0.0) throw std::invalid_argument("MediumParams: gamma must be positive");
    if (kappa2 <= 0.0) throw std::invalid_argument("MediumParams: kappa2 must be positive");
    if (d <= 0.0) throw std::invalid_argument("MediumParams: d must be positive");
    if (d0 <= 0.0) throw std::invalid_argument("MediumParams: d0 must be positive");
    if (l == 0) throw std::invalid_argument("MediumParams: l must be nonzero");
    if (larmor_coeff <= 0.0)
        throw std::invalid_argument("MediumParams: larmor_coeff must be positive");
}

double larmor_frequency(double B, const MediumParams& params) {
    return params.larmor_coeff * B;
}

namespace {

// Numerator and denominator of the dispersion curve with every frequency
// scaled by Gamma: u = Omega_L/Gamma, g = gamma/Gamma, del = Delta/Gamma.
struct ScaledCurve {
    double u2, g, k, del2;

    explicit ScaledCurve(const MediumParams& p, double B) {
        const double u = larmor_frequency(B, p) / p.Gamma;
        const double del = p.Delta / p.Gamma;
        u2 = u * u;
        g = p.gamma / p.Gamma;
        k = p.kappa2;
        del2 = del * del;
    }

    double numerator() const {
        return 8.0 * u2 * (8.0 * u2 + (k + 2.0) - 8.0 * del2) +
               g * (4.0 * g * (1.0 - 4.0 * del2) - k * (k + 2.0));
    }

    double denominator() const {
        const double diff = del2 - u2;
        return 8.0 * u2 * (32.0 * (k + 3.0) * (u2 + del2) + 192.0 * diff * diff +
                           (k + 2.0) * (k + 6.0)) +
               2.0 * g * g * ((k + 2.0) * (k + 2.0) + 16.0 * del2) *
                   ((k + 3.0) + 12.0 * del2);
    }
};

} // namespace

double rotation_angle(double B, const MediumParams& params) {
    params.validate();
    const ScaledCurve c(params, B);
    const double den = c.denominator();
    if (den == 0.0) throw domain_error("rotation_angle: dispersion denominator vanished");
    const double u = larmor_frequency(B, params) / params.Gamma;
    return 6.0 * u * params.d * c.numerator() / (params.l * params.d0 * den);
}

double weak_field_slope(const MediumParams& params) {
    params.validate();
    const double g = params.gamma / params.Gamma;
    const double k = params.kappa2;
    const double del = params.Delta / params.Gamma;
    const double del2 = del * del;
    const double num0 = g * (4.0 * g * (1.0 - 4.0 * del2) - k * (k + 2.0));
    const double den0 = 2.0 * g * g * ((k + 2.0) * (k + 2.0) + 16.0 * del2) *
                        ((k + 3.0) + 12.0 * del2);
    const double dtheta_du = 6.0 * params.d * num0 / (params.l * params.d0 * den0);
    const double du_dB = params.larmor_coeff / params.Gamma;
    return rad_to_deg(dtheta_du * du_dB);
}

double find_zero_crossing(const MediumParams& params, double B_max) {
    params.validate();
    if (B_max <= 0.0) throw std::invalid_argument("find_zero_crossing: B_max must be positive");
    auto f = [&](double B) { return rotation_angle(B, params); };
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    if (params.Delta == 0.0) {
        // On resonance the numerator is quadratic in u^2 = (Omega_L/Gamma)^2:
        // 64 y^2 + 8(k+2) y - (g k (k+2) - 4 g^2) = 0. Its positive root
        // brackets the zero; the returned value still comes from the curve.
        const double g = params.gamma / params.Gamma;
        const double k = params.kappa2;
        const double c = g * k * (k + 2.0) - 4.0 * g * g;
        if (c <= 0.0)
            throw domain_error("find_zero_crossing: curve has no interior zero");
        const double b = 8.0 * (k + 2.0);
        const double y = (-b + std::sqrt(b * b + 256.0 * c)) / 128.0;
        const double B_q = std::sqrt(y) * params.Gamma / params.larmor_coeff;
        if (B_q <= B_max) {
            lo = 0.999 * B_q;
            hi = std::min(1.001 * B_q, B_max);
            bracketed = (f(lo) < 0.0) != (f(hi) < 0.0);
        }
    }
    if (!bracketed) {
        // General detuning: scan a geometric grid for the first sign change.
        const double grid_lo = 1e-9 * B_max;
        const int n = 4000;
        lo = grid_lo;
        double flo = f(lo);
        for (int i = 1; i <= n; ++i) {
            hi = grid_lo * std::pow(B_max / grid_lo, double(i) / n);
            const double fhi = f(hi);
            if (flo == 0.0) return lo;
            if ((flo < 0.0) != (fhi < 0.0)) {
                bracketed = true;
                break;
            }
            lo = hi;
            flo = fhi;
        }
    }
    if (!bracketed)
        throw domain_error("find_zero_crossing: no crossing in bracket");
    return brent_root(f, lo, hi, 1e-6);
}

std::vector<Extremum> find_extrema(const MediumParams& params, double B_max) {
    params.validate();
    if (B_max <= 0.0) throw std::invalid_argument("find_extrema: B_max must be positive");
    auto f = [&](double B) { return rotation_angle(B, params); };
    // Geometric grid resolves both the sub-Gauss peak and the slow shoulder
    // near the top decade with the same relative spacing.
    const int n = 6000;
    const double lo = 1e-4 * std::min(1.0, B_max);
    std::vector<double> grid(n + 1);
    for (int i = 0; i <= n; ++i)
        grid[i] = lo * std::pow(B_max / lo, double(i) / n);
    std::vector<Extremum> out;
    double fprev = f(grid[0]);
    double fcur = f(grid[1]);
    for (int i = 1; i < n; ++i) {
        const double fnext = f(grid[i + 1]);
        const bool is_min = fcur < fprev && fcur < fnext;
        const bool is_max = fcur > fprev && fcur > fnext;
        if (is_min || is_max) {
            auto g = [&](double B) { return is_min ? f(B) : -f(B); };
            const double B_star = golden_min(g, grid[i - 1], grid[i + 1], 1e-6);
            out.push_back({B_star, f(B_star)});
        }
        fprev = fcur;
        fcur = fnext;
    }
    std::sort(out.begin(), out.end(),
              [](const Extremum& a, const Extremum& b) { return a.B < b.B; });
    return out;
}

std::vector<DispersionSample> sweep(const MediumParams& params,
                                    const std::vector<double>& B_values) {
    params.validate();
    std::vector<DispersionSample> out;
    out.reserve(B_values.size());
    for (double B : B_values) {
        DispersionSample s;
        s.B = B;
        s.theta = rotation_angle(B, params);
        s.theta_deg = rad_to_deg(s.theta);
        out.push_back(s);
    }
    return out;
}

} // namespace oammag
