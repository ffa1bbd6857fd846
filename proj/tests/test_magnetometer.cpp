#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oammag/errors.hpp"
#include "oammag/magnetometer.hpp"
#include "oammag/nmor_model.hpp"
#include "oammag/units.hpp"

using namespace oammag;

namespace {

std::string temp_path(const std::string& name) {
    return "/tmp/oammag_test_" + name;
}

FieldSweepRecord synthetic_sweep(double B0, double scale, double coil_lo,
                                 double coil_hi, int n,
                                 const MediumParams& params) {
    FieldSweepRecord rec;
    for (int i = 0; i < n; ++i) {
        SweepPoint p;
        p.coil_gauss = coil_lo + (coil_hi - coil_lo) * double(i) / (n - 1);
        p.theta_deg = scale * rad_to_deg(rotation_angle(p.coil_gauss - B0, params));
        rec.points.push_back(p);
    }
    return rec;
}

} // namespace

TEST_CASE("monotone branch limit sits at the first positive extremum") {
    MediumParams p;
    const double B_mono = monotone_branch_limit(p);
    CHECK(B_mono > 1.3);
    CHECK(B_mono < 1.5);
    auto ext = find_extrema(p);
    bool found = false;
    for (const auto& e : ext)
        if (e.B > 0.0 && !found) {
            CHECK(B_mono == doctest::Approx(e.B));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("invert_theta round trips on the monotone branch") {
    MediumParams p;
    CHECK(invert_theta(0.0, p) == 0.0);

    const double B_mono = monotone_branch_limit(p);
    SUBCASE("single points") {
        for (double B : {0.3, -0.4, 1.2, -1.35}) {
            const double theta = rotation_angle(B, p);
            CHECK(std::abs(invert_theta(theta, p) - B) <= 1e-6);
        }
    }

    SUBCASE("dense scan over 99 percent of the branch") {
        const int n = 41;
        for (int i = 0; i < n; ++i) {
            const double B = -0.99 * B_mono + 1.98 * B_mono * double(i) / (n - 1);
            const double got = invert_theta(rotation_angle(B, p), p);
            CHECK(std::abs(got - B) <= 1e-6);
        }
    }

    SUBCASE("outside the branch") {
        const double theta_limit = std::abs(rotation_angle(B_mono, p));
        CHECK_THROWS_AS(invert_theta(1.01 * theta_limit, p), domain_error);
        CHECK_THROWS_AS(invert_theta(-1.01 * theta_limit, p), domain_error);
        CHECK_THROWS_AS(invert_theta(theta_limit, p), domain_error);
    }
}

TEST_CASE("precision tracks the local slope") {
    MediumParams p;
    const double slope_mag = std::abs(weak_field_slope(p));

    const double at_zero = precision(0.045, p, 0.0);
    CHECK(at_zero == doctest::Approx(0.045 / slope_mag).epsilon(1e-5));
    // about 0.8 milligauss for the default medium
    CHECK(at_zero > 6e-4);
    CHECK(at_zero < 1e-3);

    CHECK(precision(0.0045, p, 0.0) == doctest::Approx(at_zero / 10.0).epsilon(1e-9));

    // resolution degrades toward the branch endpoint where the curve flattens
    const double mid = precision(0.045, p, 0.5);
    const double edge = precision(0.045, p, 1.2);
    CHECK(mid > at_zero);
    CHECK(edge > mid);

    const double B_mono = monotone_branch_limit(p);
    CHECK_THROWS_AS(precision(0.045, p, B_mono), domain_error);
    CHECK_THROWS_AS(precision(0.045, p, -1.02 * B_mono), domain_error);
    CHECK_THROWS_AS(precision(0.0, p, 0.0), std::invalid_argument);
}

TEST_CASE("calibrate_offset with a slope override") {
    MediumParams p;
    auto res = calibrate_offset(12.7204, p, CalibrationMethod::offset_slope, 59.0);
    CHECK(std::abs(res.B_background - 0.2156) <= 5e-5);
    CHECK(res.uncertainty == doctest::Approx(0.045 / 59.0).epsilon(1e-12));
    CHECK(res.uncertainty > 0.0005);
    CHECK(res.uncertainty < 0.0012);
    CHECK(res.method == CalibrationMethod::offset_slope);

    auto zero = calibrate_offset(0.0, p, CalibrationMethod::offset_slope, 59.0);
    CHECK(zero.B_background == 0.0);

    auto report = res.report();
    CHECK(report.find("B_background_gauss = ") != std::string::npos);
    CHECK(report.find("uncertainty_gauss = ") != std::string::npos);
    CHECK(report.find("method = offset_slope") != std::string::npos);
}

TEST_CASE("calibrate_offset with the model slope") {
    MediumParams p;
    const double slope_mag = std::abs(weak_field_slope(p));
    auto res = calibrate_offset(12.7204, p, CalibrationMethod::offset_slope);
    CHECK(res.B_background == doctest::Approx(12.7204 / slope_mag).epsilon(1e-12));
    // the model slope is in the mid-50s of degrees per Gauss
    CHECK(std::abs(res.B_background - 0.2278) <= 5e-4);
}

TEST_CASE("full inversion agrees with the slope method at small angles") {
    MediumParams p;
    for (double theta : {0.5, 2.0, 5.0}) {
        auto lin = calibrate_offset(theta, p, CalibrationMethod::offset_slope);
        auto inv = calibrate_offset(theta, p, CalibrationMethod::full_inversion);
        CHECK(inv.B_background ==
              doctest::Approx(lin.B_background).epsilon(0.01));
        CHECK(inv.B_background > 0.0);
        CHECK(inv.uncertainty > 0.0);
    }
    // the flip convention: positive measured angle means positive field
    auto neg = calibrate_offset(-2.0, p, CalibrationMethod::full_inversion);
    CHECK(neg.B_background < 0.0);

    CHECK_THROWS_AS(calibrate_offset(1.0, p, CalibrationMethod::symmetry_fit),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        calibrate_offset(std::nan(""), p, CalibrationMethod::offset_slope),
        std::invalid_argument);
    CHECK_THROWS_AS(
        calibrate_offset(1.0, p, CalibrationMethod::offset_slope, 0.0),
        std::invalid_argument);
}

TEST_CASE("symmetry fit recovers the injected center") {
    MediumParams p;
    SUBCASE("noiseless, several centers and gains") {
        for (double B0 : {-1.0, 0.2156, 2.0}) {
            for (double scale : {1.0, 1.37, -0.8}) {
                auto sweep = synthetic_sweep(B0, scale, -3.0, 3.0, 41, p);
                auto res = fit_symmetry_center(sweep, p);
                CHECK(std::abs(res.B_background - B0) <= 1e-4);
                CHECK(res.residual <= 1e-4);
                CHECK(res.method == CalibrationMethod::symmetry_fit);
                CHECK(res.report().find("method = symmetry_fit") != std::string::npos);
            }
        }
    }

    SUBCASE("gaussian angle noise at the estimator accuracy") {
        const double B0 = 0.2156;
        double worst = 0.0;
        for (unsigned seed = 0; seed < 10; ++seed) {
            auto sweep = synthetic_sweep(B0, 1.0, -1.0, 1.0, 41, p);
            std::mt19937 rng(seed);
            std::normal_distribution<double> noise(0.0, 0.045);
            for (auto& pt : sweep.points) pt.theta_deg += noise(rng);
            auto res = fit_symmetry_center(sweep, p);
            worst = std::max(worst, std::abs(res.B_background - B0));
            CHECK(res.uncertainty > 1e-5);
            CHECK(res.uncertainty < 1e-2);
        }
        CHECK(worst <= 5e-3);
    }

    SUBCASE("degenerate input") {
        FieldSweepRecord tiny;
        for (int i = 0; i < 4; ++i) tiny.points.push_back({double(i), double(i)});
        CHECK_THROWS_AS(fit_symmetry_center(tiny, p), std::invalid_argument);

        FieldSweepRecord flat;
        for (int i = 0; i < 8; ++i) flat.points.push_back({double(i), 0.25});
        CHECK_THROWS_AS(fit_symmetry_center(flat, p), domain_error);

        FieldSweepRecord pinned;
        for (int i = 0; i < 8; ++i) pinned.points.push_back({1.0, double(i)});
        CHECK_THROWS_AS(fit_symmetry_center(pinned, p), domain_error);
    }
}

TEST_CASE("sweep csv round trip") {
    const std::string path = temp_path("sweep.csv");
    FieldSweepRecord rec;
    rec.points.push_back({-1.25, 70.123456789012345});
    rec.points.push_back({0.0, 0.0});
    rec.points.push_back({2.5, -31.0e-4});
    write_sweep_csv(rec, path);
    auto back = read_sweep_csv(path);
    REQUIRE(back.points.size() == rec.points.size());
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        CHECK(back.points[i].coil_gauss == rec.points[i].coil_gauss);
        CHECK(back.points[i].theta_deg == rec.points[i].theta_deg);
    }
    std::remove(path.c_str());
}

TEST_CASE("sweep csv rejects malformed input") {
    const std::string path = temp_path("bad.csv");

    CHECK_THROWS_AS(read_sweep_csv(temp_path("missing.csv")), io_error);

    auto write_text = [&](const std::string& text) {
        std::FILE* f = std::fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    };

    write_text("wrong,header\n1,2\n");
    CHECK_THROWS_AS(read_sweep_csv(path), io_error);

    write_text("coil_gauss,theta_deg\n1.0;2.0\n");
    CHECK_THROWS_AS(read_sweep_csv(path), io_error);

    write_text("coil_gauss,theta_deg\n1.0,abc\n");
    CHECK_THROWS_AS(read_sweep_csv(path), io_error);

    write_text("coil_gauss,theta_deg\n1.0e,2\n");
    CHECK_THROWS_AS(read_sweep_csv(path), io_error);

    // blank lines and CRLF endings are tolerated
    write_text("coil_gauss,theta_deg\r\n1.0,2.0\r\n\r\n-3.5,0.25\r\n");
    auto rec = read_sweep_csv(path);
    REQUIRE(rec.points.size() == 2);
    CHECK(rec.points[1].coil_gauss == -3.5);
    std::remove(path.c_str());
}
