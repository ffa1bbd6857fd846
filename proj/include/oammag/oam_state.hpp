#pragma once

#include <functional>

namespace oammag {

// Two-component superposition of left/right circular polarization carrying
// opposite orbital angular momentum +l / -l. Phases are kept unwrapped so the
// pattern angle derived from them stays single-valued.
struct HybridState {
    int l = 1;              // OAM quantum number, nonzero
    double phase_L = 0.0;   // radians, coefficient phase on the +l component
    double phase_R = 0.0;   // radians, coefficient phase on the -l component
    double amplitude_L = 0.0;
    double amplitude_R = 0.0;
};

struct BirefringenceSetting {
    double n_L = 1.0;       // refractive index, left circular
    double n_R = 1.0;       // refractive index, right circular
    double d_cm = 5.0;      // propagation length in the medium
    double lambda_nm = 795.0;
};

using RadialProfile = std::function<double(double)>;

// Interference pattern of the projected state: intensity at radius r and
// azimuth alpha is cos^2(l*(theta+alpha)) * E(r)^2.
struct ScalarPattern {
    int l = 1;
    double theta = 0.0;     // pattern rotation angle, radians
    RadialProfile profile;  // amplitude E(r), r in beam-waist units
};

// Single-ringed annular mode amplitude (r/w)^|l| exp(-r^2/w^2).
RadialProfile annular_profile(int l, double waist = 1.0);

// Balanced superposition with zero phases; throws std::invalid_argument for l = 0.
HybridState initial_state(int l);

// Relative phase 2*pi*(n_L - n_R)*d/lambda between the circular components.
double phase_shift(const BirefringenceSetting& setting);

// Advances phase_L by +delta_phi/2 and phase_R by -delta_phi/2.
HybridState apply_birefringence(const HybridState& state, double delta_phi);

// Projects onto horizontal polarization; the resulting pattern angle is
// (phase_L - phase_R) / (2*l).
ScalarPattern project_horizontal(const HybridState& state);

double intensity_at(const ScalarPattern& pattern, double r, double alpha);

} // namespace oammag
