#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oammag/errors.hpp"
#include "oammag/kernels/dispatch.hpp"
#include "oammag/magnetometer.hpp"
#include "oammag/nmor_model.hpp"
#include "oammag/oam_state.hpp"
#include "oammag/pattern_image.hpp"
#include "oammag/pgm_io.hpp"
#include "oammag/rotation_estimator.hpp"
#include "oammag/units.hpp"

namespace {

using namespace oammag;

struct RunConfig {
    MediumParams params;
    ImageGeometry geometry;
    NoiseSpec noise;
    EstimatorConfig estimator;
    std::string output_dir = ".";
    std::string backend = "auto";
    bool supersample = false;
    int bit_depth = 16;
};

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::filesystem::path resolve(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_absolute()) return p;
    return std::filesystem::path(cfg.output_dir) / p;
}

void apply_backend(const RunConfig& cfg) {
    if (cfg.backend == "auto") {
        kernels::set_backend(kernels::Backend::automatic);
    } else if (cfg.backend == "scalar") {
        kernels::set_backend(kernels::Backend::scalar);
    } else if (cfg.backend == "avx2") {
        kernels::set_backend(kernels::Backend::avx2);
    } else {
        throw std::invalid_argument("unknown backend '" + cfg.backend + "'");
    }
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--l", cfg.params.l, "OAM quantum number");
    cmd->add_option("--linewidth-mhz", cfg.params.Gamma, "Spectral width of the line, MHz");
    cmd->add_option("--transit-mhz", cfg.params.gamma, "Transit relaxation rate, MHz");
    cmd->add_option("--kappa2", cfg.params.kappa2, "Optical-pumping saturation parameter");
    cmd->add_option("--detuning-mhz", cfg.params.Delta, "Detuning from resonance, MHz");
    cmd->add_option("--cell-cm", cfg.params.d, "Vapor-cell length, cm");
    cmd->add_option("--absorb-cm", cfg.params.d0, "Absorption length, cm");
    cmd->add_option("--larmor-mhz-per-gauss", cfg.params.larmor_coeff,
                    "Larmor frequency per Gauss, MHz/G");
}

void add_geometry_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--width", cfg.geometry.width, "Image width, pixels");
    cmd->add_option("--height", cfg.geometry.height, "Image height, pixels");
    cmd->add_option("--center-x-px", cfg.geometry.center_x, "Optic axis x, pixels");
    cmd->add_option("--center-y-px", cfg.geometry.center_y, "Optic axis y, pixels");
    cmd->add_option("--pixels-per-waist", cfg.geometry.pixels_per_waist,
                    "Beam waist in pixels");
    cmd->add_flag("--supersample", cfg.supersample, "2x2 subpixel averaging");
    cmd->add_option("--bit-depth", cfg.bit_depth, "PGM bit depth (8 or 16)")
        ->check(CLI::IsMember({8, 16}));
}

void add_noise_flags(CLI::App* cmd, RunConfig& cfg) {
    static const std::map<std::string, NoiseKind> kinds{
        {"none", NoiseKind::none},
        {"gaussian", NoiseKind::gaussian},
        {"poisson", NoiseKind::poisson}};
    cmd->add_option("--noise", cfg.noise.kind, "Noise kind: none, gaussian, poisson")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    cmd->add_option("--noise-sigma", cfg.noise.sigma,
                    "Gaussian noise std dev, fraction of peak");
    cmd->add_option("--peak-counts", cfg.noise.peak_counts,
                    "Poisson mean counts at peak intensity");
    cmd->add_option("--seed", cfg.noise.seed, "Noise random seed");
}

void add_estimator_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--ladder", cfg.estimator.ladder,
                    "Scan step sizes, degrees, coarse to fine");
    cmd->add_option("--window-halfwidth", cfg.estimator.window_halfwidth,
                    "Refinement window in multiples of the previous step");
    cmd->add_option("--mask-r-min", cfg.estimator.mask_r_min,
                    "Correlation annulus inner radius, waist units");
    cmd->add_option("--mask-r-max", cfg.estimator.mask_r_max,
                    "Correlation annulus outer radius, waist units");
    cmd->add_flag("--refine", cfg.estimator.refine, "Parabolic peak refinement");
}

ScalarPattern pattern_at(const RunConfig& cfg, double theta_rad) {
    ScalarPattern p;
    p.l = cfg.params.l;
    p.theta = theta_rad;
    p.profile = annular_profile(cfg.params.l);
    return p;
}

void write_curve_csv(const CorrelationCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("curve csv: cannot open '" + path.string() + "' for writing");
    out << "angle_deg,score\n";
    for (std::size_t i = 0; i < curve.angles.size(); ++i)
        out << fmt(curve.angles[i]) << "," << fmt(curve.scores[i]) << "\n";
    if (!out) throw io_error("curve csv: write to '" + path.string() + "' failed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis of magnetic-field-induced rotation of "
                 "OAM interference patterns"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key = value config file; flags override");

    RunConfig cfg;
    app.add_option("--outdir", cfg.output_dir, "Directory for output artifacts")
        ->envname("OAMMAG_OUTDIR");
    app.add_option("--backend", cfg.backend, "Kernel backend: auto, scalar, avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    // theta
    auto* c_theta = app.add_subcommand("theta", "Rotation angle at one field value");
    double b_gauss = 0.0;
    c_theta->add_option("--b-gauss", b_gauss, "Magnetic field, Gauss")->required();
    add_model_flags(c_theta, cfg);
    c_theta->callback([&] {
        const double th = rotation_angle(b_gauss, cfg.params);
        std::cout << "theta_rad = " << fmt(th) << "\n";
        std::cout << "theta_deg = " << fmt(rad_to_deg(th)) << "\n";
    });

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "Rotation curve over a field range");
    double b_start = -138.0, b_end = 138.0;
    int steps = 277;
    std::string sweep_out = "sweep.csv";
    c_sweep->add_option("--b-start-gauss", b_start, "Range start, Gauss");
    c_sweep->add_option("--b-end-gauss", b_end, "Range end, Gauss");
    c_sweep->add_option("--steps", steps, "Number of samples")->check(CLI::PositiveNumber);
    c_sweep->add_option("--out", sweep_out, "Output CSV path");
    add_model_flags(c_sweep, cfg);
    c_sweep->callback([&] {
        std::vector<double> bs(static_cast<std::size_t>(steps), 0.0);
        for (int i = 0; i < steps; ++i)
            bs[std::size_t(i)] =
                steps == 1 ? b_start
                           : b_start + (b_end - b_start) * double(i) / (steps - 1);
        const auto samples = sweep(cfg.params, bs);
        const auto path = resolve(cfg, sweep_out);
        std::ofstream out(path);
        if (!out) throw io_error("sweep csv: cannot open '" + path.string() + "' for writing");
        out << "b_gauss,theta_deg\n";
        for (const auto& s : samples)
            out << fmt(s.B) << "," << fmt(s.theta_deg) << "\n";
        if (!out) throw io_error("sweep csv: write to '" + path.string() + "' failed");
        std::cout << "wrote " << path.string() << " (" << samples.size() << " rows)\n";
    });

    // render
    auto* c_render = app.add_subcommand("render", "Render the pattern image");
    double render_b = 0.0, render_theta_deg = 0.0;
    std::string render_out = "pattern.pgm";
    auto* opt_rb = c_render->add_option("--b-gauss", render_b, "Field, Gauss");
    auto* opt_rt = c_render->add_option("--theta-deg", render_theta_deg,
                                        "Explicit pattern angle, degrees");
    opt_rt->excludes(opt_rb);
    c_render->add_option("--out", render_out, "Output PGM path");
    add_model_flags(c_render, cfg);
    add_geometry_flags(c_render, cfg);
    add_noise_flags(c_render, cfg);
    c_render->callback([&] {
        apply_backend(cfg);
        const double theta = opt_rt->count() ? deg_to_rad(render_theta_deg)
                                             : rotation_angle(render_b, cfg.params);
        PatternImage img = render(pattern_at(cfg, theta), cfg.geometry, cfg.supersample);
        img.bit_depth = cfg.bit_depth;
        img = add_noise(img, cfg.noise);
        const auto path = resolve(cfg, render_out);
        write_image(img, path.string());
        std::cout << "wrote " << path.string() << "\n";
    });

    // estimate
    auto* c_est = app.add_subcommand("estimate", "Rotation angle between two images");
    std::string ref_path, target_path, curve_out;
    c_est->add_option("--ref", ref_path, "Reference PGM")->required();
    c_est->add_option("--target", target_path, "Target PGM")->required();
    c_est->add_option("--curve-csv", curve_out, "Write the finest correlation curve");
    double est_ppw = 0.0, est_cx = 0.0, est_cy = 0.0;
    auto* opt_ppw = c_est->add_option("--pixels-per-waist", est_ppw,
                                      "Override beam waist in pixels for both images");
    auto* opt_cx = c_est->add_option("--center-x-px", est_cx, "Override optic axis x");
    auto* opt_cy = c_est->add_option("--center-y-px", est_cy, "Override optic axis y");
    add_model_flags(c_est, cfg);
    add_estimator_flags(c_est, cfg);
    c_est->callback([&] {
        apply_backend(cfg);
        PatternImage ref = read_image(ref_path);
        PatternImage target = read_image(target_path);
        for (PatternImage* img : {&ref, &target}) {
            if (opt_ppw->count()) img->geometry.pixels_per_waist = est_ppw;
            if (opt_cx->count()) img->geometry.center_x = est_cx;
            if (opt_cy->count()) img->geometry.center_y = est_cy;
        }
        const RotationEstimate est =
            estimate_rotation(ref, target, cfg.estimator, cfg.params.l);
        std::cout << "angle_deg = " << fmt(est.angle) << "\n";
        std::cout << "peak_score = " << fmt(est.peak_score) << "\n";
        if (!curve_out.empty()) {
            const auto path = resolve(cfg, curve_out);
            write_curve_csv(est.curve_finest, path);
            std::cout << "wrote " << path.string() << "\n";
        }
    });

    // invert
    auto* c_inv = app.add_subcommand("invert", "Field from a rotation angle");
    double inv_theta_deg = 0.0;
    c_inv->add_option("--theta-deg", inv_theta_deg, "Rotation angle, degrees")->required();
    add_model_flags(c_inv, cfg);
    c_inv->callback([&] {
        const double B = invert_theta(deg_to_rad(inv_theta_deg), cfg.params);
        std::cout << "b_gauss = " << fmt(B) << "\n";
        std::cout << "b_mgauss = " << fmt(B * 1000.0) << "\n";
    });

    // pipeline
    auto* c_pipe = app.add_subcommand(
        "pipeline", "Render reference and target, estimate, invert back to field");
    double b_true = 0.0;
    bool save_images = false;
    c_pipe->add_option("--b-true-gauss", b_true, "Injected field, Gauss")->required();
    c_pipe->add_flag("--save-images", save_images, "Write reference/target PGMs");
    add_model_flags(c_pipe, cfg);
    add_geometry_flags(c_pipe, cfg);
    add_noise_flags(c_pipe, cfg);
    add_estimator_flags(c_pipe, cfg);
    c_pipe->callback([&] {
        apply_backend(cfg);
        PatternImage ref = render(pattern_at(cfg, 0.0), cfg.geometry, cfg.supersample);
        PatternImage target = render(pattern_at(cfg, rotation_angle(b_true, cfg.params)),
                                     cfg.geometry, cfg.supersample);
        if (cfg.noise.kind != NoiseKind::none) {
            NoiseSpec ref_noise = cfg.noise;
            NoiseSpec target_noise = cfg.noise;
            target_noise.seed = cfg.noise.seed + 1;
            ref = add_noise(ref, ref_noise);
            target = add_noise(target, target_noise);
        }
        if (save_images) {
            ref.bit_depth = cfg.bit_depth;
            target.bit_depth = cfg.bit_depth;
            write_image(ref, resolve(cfg, "reference.pgm").string());
            write_image(target, resolve(cfg, "target.pgm").string());
        }
        const RotationEstimate est =
            estimate_rotation(ref, target, cfg.estimator, cfg.params.l);
        const double B_est = invert_theta(deg_to_rad(est.angle), cfg.params);
        std::cout << "b_true_gauss = " << fmt(b_true) << "\n";
        std::cout << "angle_est_deg = " << fmt(est.angle) << "\n";
        std::cout << "b_est_gauss = " << fmt(B_est) << "\n";
        std::cout << "error_gauss = " << fmt(B_est - b_true) << "\n";
    });

    // Parent-level options (--outdir, --backend, --config) may also appear
    // after the subcommand name.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const oammag::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const oammag::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
