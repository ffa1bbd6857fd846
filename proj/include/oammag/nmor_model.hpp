#pragma once

#include <vector>

namespace oammag {

// Parameters of the near-resonance rotation model. Frequencies in MHz,
// lengths in cm, larmor_coeff in MHz per Gauss.
struct MediumParams {
    double Gamma = 266.0;    // spectral width of the absorption line
    double gamma = 1.064;    // transit relaxation rate (0.004 * Gamma)
    double kappa2 = 3.3;     // optical-pumping saturation parameter
    double Delta = 0.0;      // detuning from resonance
    double d = 5.0;          // vapor-cell length
    double d0 = 0.5;         // unsaturated absorption length on resonance
    int l = 2;               // OAM of the probe beam, nonzero
    double larmor_coeff = 0.7;

    static MediumParams defaults() { return MediumParams{}; }

    // Sets gamma as a fraction of Gamma.
    MediumParams& with_gamma_ratio(double ratio);
    // Rabi frequency implied by kappa2 = Omega_R^2 / (Gamma*gamma).
    double rabi_frequency() const;
    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct DispersionSample {
    double B = 0.0;          // Gauss
    double theta = 0.0;      // radians
    double theta_deg = 0.0;
};

struct Extremum {
    double B = 0.0;          // Gauss
    double theta = 0.0;      // radians
};

// Larmor frequency larmor_coeff * B, in MHz, signed.
double larmor_frequency(double B, const MediumParams& params);

// Rotation angle theta(B) in radians. All frequency terms are evaluated in
// units of Gamma so the sixth-power products stay well inside double range.
double rotation_angle(double B, const MediumParams& params);

// Analytic d(theta)/dB at B = 0, in degrees per Gauss, signed.
double weak_field_slope(const MediumParams& params);

// Smallest positive B with theta(B) = 0, to 1e-6 Gauss. Searches (0, B_max];
// throws domain_error when theta keeps one sign over the bracket.
double find_zero_crossing(const MediumParams& params, double B_max = 1000.0);

// Stationary points of theta on (0, B_max], ordered by B; found from sign
// changes of the finite-difference derivative, refined by golden section
// to 1e-6 Gauss. Negative-B extrema are the mirror images by oddness.
std::vector<Extremum> find_extrema(const MediumParams& params, double B_max = 1000.0);

// Element-wise rotation_angle, preserving input order.
std::vector<DispersionSample> sweep(const MediumParams& params,
                                    const std::vector<double>& B_values);

} // namespace oammag
