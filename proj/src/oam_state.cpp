#include "oammag/oam_state.hpp"

#include <cmath>
#include <stdexcept>

#include "oammag/units.hpp"

namespace oammag {

RadialProfile annular_profile(int l, double waist) {
    const int m = std::abs(l);
    return [m, waist](double r) {
        const double x = r / waist;
        double p = 1.0;
        for (int i = 0; i < m; ++i) p *= x;
        return p * std::exp(-x * x);
    };
}

HybridState initial_state(int l) {
    if (l == 0)
        throw std::invalid_argument("initial_state: l = 0 has no azimuthal structure");
    HybridState s;
    s.l = l;
    s.phase_L = 0.0;
    s.phase_R = 0.0;
    s.amplitude_L = 1.0 / std::sqrt(2.0);
    s.amplitude_R = 1.0 / std::sqrt(2.0);
    return s;
}

double phase_shift(const BirefringenceSetting& setting) {
    if (setting.d_cm <= 0.0) throw std::invalid_argument("phase_shift: d must be positive");
    if (setting.lambda_nm <= 0.0)
        throw std::invalid_argument("phase_shift: lambda must be positive");
    const double d_m = setting.d_cm * 1e-2;
    const double lambda_m = setting.lambda_nm * 1e-9;
    return 2.0 * pi * (setting.n_L - setting.n_R) * d_m / lambda_m;
}

HybridState apply_birefringence(const HybridState& state, double delta_phi) {
    HybridState s = state;
    s.phase_L += 0.5 * delta_phi;
    s.phase_R -= 0.5 * delta_phi;
    return s;
}

ScalarPattern project_horizontal(const HybridState& state) {
    ScalarPattern p;
    p.l = state.l;
    p.theta = (state.phase_L - state.phase_R) / (2.0 * state.l);
    p.profile = annular_profile(state.l);
    return p;
}

double intensity_at(const ScalarPattern& pattern, double r, double alpha) {
    const double c = std::cos(pattern.l * (pattern.theta + alpha));
    const double e = pattern.profile ? pattern.profile(r) : 1.0;
    return c * c * e * e;
}

} // namespace oammag
