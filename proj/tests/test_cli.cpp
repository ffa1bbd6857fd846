#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env;
    if (!cmd.empty()) cmd += " ";
    cmd += std::string(OAMMAG_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[512];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

double value_of(const std::string& out, const std::string& key) {
    const std::string needle = key + " = ";
    const auto pos = out.find(needle);
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + needle.size()));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path work = "/tmp/oammag_cli_test";

struct WorkDir {
    WorkDir() {
        fs::remove_all(work);
        fs::create_directories(work);
    }
};

} // namespace

TEST_CASE("theta reports the rotation at one field value") {
    WorkDir wd;
    auto zero = run_cli("theta --b-gauss 0");
    CHECK(zero.code == 0);
    CHECK(value_of(zero.out, "theta_rad") == 0.0);
    CHECK(value_of(zero.out, "theta_deg") == 0.0);

    auto r = run_cli("theta --b-gauss 0.3");
    CHECK(r.code == 0);
    CHECK(std::abs(value_of(r.out, "theta_deg") - (-16.046370622951301)) <= 1e-6);

    auto r5 = run_cli("theta --b-gauss 0.5");
    CHECK(std::abs(value_of(r5.out, "theta_deg") - (-24.885772229412805)) <= 1e-6);

    // halving l doubles the rotation
    auto l1 = run_cli("theta --b-gauss 0.5 --l 1");
    CHECK(value_of(l1.out, "theta_deg") ==
          doctest::Approx(2.0 * value_of(r5.out, "theta_deg")).epsilon(1e-12));

    // odd in B
    auto plus = run_cli("theta --b-gauss 7");
    auto minus = run_cli("theta --b-gauss -7");
    CHECK(std::abs(value_of(plus.out, "theta_rad") +
                   value_of(minus.out, "theta_rad")) <= 1e-12);
}

TEST_CASE("sweep writes the rotation curve as csv") {
    WorkDir wd;
    const auto path = work / "sweep.csv";
    auto r = run_cli("sweep --out " + path.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("wrote ") != std::string::npos);
    CHECK(r.out.find("(277 rows)") != std::string::npos);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "b_gauss,theta_deg");
    std::vector<double> bs, ths;
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        bs.push_back(std::stod(line.substr(0, comma)));
        ths.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(bs.size() == 277);
    CHECK(bs.front() == doctest::Approx(-138.0));
    CHECK(bs.back() == doctest::Approx(138.0));
    // odd symmetry across the mirrored rows
    for (std::size_t i = 0; i < bs.size(); ++i) {
        CHECK(std::abs(bs[i] + bs[bs.size() - 1 - i]) <= 1e-9);
        CHECK(std::abs(ths[i] + ths[ths.size() - 1 - i]) <= 1e-9);
    }

    // rerun is byte-identical
    const auto again = work / "sweep2.csv";
    auto r2 = run_cli("sweep --out " + again.string());
    CHECK(r2.code == 0);
    CHECK(slurp(path) == slurp(again));

    // single sample collapses to the range start
    const auto single = work / "one.csv";
    auto r3 = run_cli("sweep --b-start-gauss 0.4 --b-end-gauss 9 --steps 1 --out " +
                      single.string());
    CHECK(r3.code == 0);
    std::ifstream sin(single);
    std::getline(sin, header);
    std::getline(sin, line);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == doctest::Approx(0.4));
    auto direct = run_cli("theta --b-gauss 0.4");
    CHECK(std::stod(line.substr(comma + 1)) ==
          doctest::Approx(value_of(direct.out, "theta_deg")).epsilon(1e-12));
}

TEST_CASE("render, estimate and invert round trip through image files") {
    WorkDir wd;
    const std::string geom =
        " --width 256 --height 256 --center-x-px 127.5 --center-y-px 127.5"
        " --pixels-per-waist 32";
    const auto ref = work / "ref.pgm";
    const auto tgt = work / "tgt.pgm";
    auto r1 = run_cli("render --theta-deg 0 --out " + ref.string() + geom);
    REQUIRE(r1.code == 0);
    auto r2 = run_cli("render --theta-deg 7.3210 --out " + tgt.string() + geom);
    REQUIRE(r2.code == 0);
    CHECK(fs::exists(ref));
    CHECK(fs::exists(tgt));

    const auto curve = work / "curve.csv";
    auto est = run_cli("estimate --ref " + ref.string() + " --target " + tgt.string() +
                       " --curve-csv " + curve.string());
    REQUIRE(est.code == 0);
    CHECK(std::abs(value_of(est.out, "angle_deg") - 7.3210) <= 0.05);
    CHECK(value_of(est.out, "peak_score") > 0.999);

    std::ifstream cin_(curve);
    REQUIRE(cin_.good());
    std::string header;
    std::getline(cin_, header);
    CHECK(header == "angle_deg,score");
    int rows = 0;
    std::string line;
    while (std::getline(cin_, line))
        if (!line.empty()) ++rows;
    CHECK(rows >= 3);

    auto inv = run_cli("invert --theta-deg -16.046370622951301");
    REQUIRE(inv.code == 0);
    CHECK(std::abs(value_of(inv.out, "b_gauss") - 0.3) <= 1e-6);
    CHECK(value_of(inv.out, "b_mgauss") ==
          doctest::Approx(1000.0 * value_of(inv.out, "b_gauss")).epsilon(1e-12));
}

TEST_CASE("pipeline recovers the injected field") {
    WorkDir wd;
    const std::string geom =
        " --width 256 --height 256 --center-x-px 127.5 --center-y-px 127.5"
        " --pixels-per-waist 32";
    auto r = run_cli("pipeline --b-true-gauss 0.3 --save-images --outdir " +
                     work.string() + geom);
    REQUIRE(r.code == 0);
    CHECK(value_of(r.out, "b_true_gauss") == doctest::Approx(0.3));
    CHECK(std::abs(value_of(r.out, "error_gauss")) <= 8e-4);
    CHECK(value_of(r.out, "b_est_gauss") ==
          doctest::Approx(0.3 + value_of(r.out, "error_gauss")).epsilon(1e-9));
    CHECK(fs::exists(work / "reference.pgm"));
    CHECK(fs::exists(work / "target.pgm"));
}

TEST_CASE("scalar and avx2 backends print identical results") {
    WorkDir wd;
    const std::string geom =
        " --width 256 --height 256 --center-x-px 127.5 --center-y-px 127.5"
        " --pixels-per-waist 32";
    const std::string base = "pipeline --b-true-gauss -0.45" + geom;
    auto scalar = run_cli(base + " --backend scalar");
    REQUIRE(scalar.code == 0);
    auto vec = run_cli(base + " --backend avx2");
    if (vec.code == 0) {
        CHECK(vec.out == scalar.out);
    } else {
        // host without avx2: forcing it is an invalid argument
        CHECK(vec.code == 4);
    }
}

TEST_CASE("outdir can come from the environment") {
    WorkDir wd;
    auto r = run_cli("sweep --steps 3 --b-start-gauss -1 --b-end-gauss 1 --out env.csv",
                     "OAMMAG_OUTDIR=" + work.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(work / "env.csv"));
}

TEST_CASE("config file supplies defaults that flags override") {
    WorkDir wd;
    const auto cfg = work / "run.ini";
    {
        std::ofstream out(cfg);
        out << "backend=scalar\n\n[theta]\nb-gauss=0.25\n";
    }
    auto r = run_cli("theta --config " + cfg.string());
    CHECK(r.code == 0);
    auto direct = run_cli("theta --b-gauss 0.25");
    CHECK(value_of(r.out, "theta_deg") ==
          doctest::Approx(value_of(direct.out, "theta_deg")).epsilon(1e-12));

    // a flag beats the config value
    auto over = run_cli("theta --b-gauss 0.5 --config " + cfg.string());
    auto half = run_cli("theta --b-gauss 0.5");
    CHECK(value_of(over.out, "theta_deg") ==
          doctest::Approx(value_of(half.out, "theta_deg")).epsilon(1e-12));
}

TEST_CASE("failure exit codes") {
    WorkDir wd;
    // model domain failure: angle beyond the monotone branch
    CHECK(run_cli("invert --theta-deg 60").code == 2);
    // missing input file
    CHECK(run_cli("estimate --ref /tmp/oammag_no_such.pgm --target /tmp/oammag_no_such.pgm")
              .code == 3);
    // invalid geometry
    CHECK(run_cli("render --width 8 --height 8 --theta-deg 0 --out " +
                  (work / "x.pgm").string())
              .code == 4);
    // parse error from an unknown flag
    CHECK(run_cli("theta --b-gauss 1 --no-such-flag").code != 0);
    // bad enum value
    CHECK(run_cli("theta --b-gauss 1 --backend turbo").code != 0);
    // missing required option
    CHECK(run_cli("invert").code != 0);
    // no subcommand
    CHECK(run_cli("").code != 0);
}
