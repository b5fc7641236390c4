#include "calib/harness.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace calib;
namespace fs = std::filesystem;

namespace {

const std::string kDir = CALIB_SCENE_DIR;

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("calib-test-" + tag + "-" + std::to_string(std::random_device{}()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& yaml) {
    try {
        parse_scene(yaml, "s.yaml");
    } catch (const SceneError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(SceneIo, ParsesShippedScenes) {
    for (const char* f : {"disk_diameter_rotation.yaml", "disk_diameter_shear.yaml", "orthogonal_arc_static.yaml",
                          "dipole_chord.yaml"}) {
        const Scene sc = load_scene(kDir + "/" + f);
        EXPECT_NO_THROW(validate_scene(sc)) << f;
    }
    const Scene sc = load_scene(kDir + "/disk_diameter_shear.yaml");
    EXPECT_DOUBLE_EQ(sc.horizon, 0.5);
    EXPECT_EQ(sc.interfaces.size(), 1u);
}

TEST(SceneIo, ErrorsCarryLineAndColumn) {
    const std::string e1 = error_of("interfaces:\n  - {shape: blob}\n");
    EXPECT_NE(e1.find("s.yaml:2:"), std::string::npos) << e1;
    EXPECT_NE(e1.find("blob"), std::string::npos);

    const std::string e2 = error_of("interfaces:\n  - {shape: diameter, angle: 0}\nhorizn: 1\n");
    EXPECT_NE(e2.find("s.yaml:3:1"), std::string::npos) << e2;

    const std::string e3 = error_of("interfaces:\n  - {shape: diameter, angle: 0}\nhorizon: -1\n");
    EXPECT_NE(e3.find("s.yaml:3:"), std::string::npos) << e3;

    const std::string e4 = error_of("interfaces: [\n");
    EXPECT_NE(e4.find("s.yaml:"), std::string::npos) << e4;

    EXPECT_NE(error_of("interfaces: []\n").find("non-empty"), std::string::npos);
    EXPECT_NE(error_of("interfaces:\n  - {shape: chord, angle: 0, offset: 1.5}\n").find("s.yaml:2:"),
              std::string::npos);
    EXPECT_NE(error_of("interfaces:\n  - {shape: diameter, angle: 0}\ncalibration: {delta: 2}\n").find("s.yaml:3:"),
              std::string::npos);
}

TEST(SceneIo, MissingFileAndBadAngleMapToExitTwo) {
    try {
        load_scene(kDir + "/does_not_exist.yaml");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_EQ(exit_code_for(e), 2);
    }
    const Scene sc = load_scene(kDir + "/chord60_invalid.yaml");
    try {
        validate_scene(sc);
        FAIL();
    } catch (const AngleViolation& e) {
        EXPECT_EQ(exit_code_for(e), 2);
    }
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Report, CsvRoundTripIsExact) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1e3, 1e3);
    Table t{"demo", {"a", "b", "c"}, {}};
    for (int i = 0; i < 50; ++i) t.rows.push_back({U(rng), U(rng) * 1e-200, std::ldexp(U(rng), -60)});
    std::stringstream ss;
    write_csv(ss, t);
    const Table r = read_csv(ss);
    EXPECT_EQ(r.kind, "demo");
    EXPECT_EQ(r.columns, t.columns);
    EXPECT_EQ(r.rows, t.rows);
}

TEST(Report, EmptyTableAndSchemaVersion) {
    std::stringstream ss;
    write_csv(ss, Table{"empty", {"x"}, {}});
    EXPECT_EQ(ss.str(), schema_line("empty") + "\nx\n");
    EXPECT_TRUE(read_csv(ss).rows.empty());

    std::stringstream old(schema_line("demo", kReportSchema + 1) + "\nx\n1\n");
    EXPECT_THROW(read_csv(old), IoError);
    std::stringstream plain("x\n1\n");
    EXPECT_THROW(read_csv(plain), IoError);

    std::stringstream bad;
    EXPECT_THROW(write_csv(bad, Table{"w", {"x", "y"}, {{1.0}}}), IoError);
}

TEST(Report, NonFiniteJsonNumbers) {
    EXPECT_TRUE(number_json(1.5).is_number());
    EXPECT_EQ(number_json(std::numeric_limits<double>::infinity()), Json("inf"));
}

TEST(Harness, GronwallConstantOracle) {
    std::vector<double> ts, E;
    for (int k = 0; k <= 20; ++k) {
        ts.push_back(0.05 * k);
        E.push_back(0.3 * 2.0 * std::exp(2.0 * ts.back()));
    }
    E[0] = 0.3;
    // smallest C with E(t) <= E(0) C e^{C t}; the binding point is the far end
    const double C = gronwall_constant(ts, E, 0.3);
    EXPECT_NEAR(std::log(C) + C * 1.0, std::log(2.0) + 2.0, 1e-10);
    EXPECT_NEAR(C, 2.0, 1e-9);

    EXPECT_DOUBLE_EQ(gronwall_constant(ts, std::vector<double>(ts.size(), 0.3), 0.3), 1.0);
    EXPECT_THROW(gronwall_constant({0.0, 1.0}, {0.0, 1e-3}, 0.0), DegenerateFit);
    EXPECT_NO_THROW(gronwall_constant({0.0, 1.0}, {0.0, 1e-12}, 0.0));
}

TEST(Harness, VerifyRunWritesReportsAndIsDeterministic) {
    ExperimentConfig cfg;
    cfg.scene = kDir + "/disk_diameter_rotation.yaml";
    cfg.suites = {"weight"};
    cfg.samples = 200;
    const fs::path a = fresh_dir("a"), b = fresh_dir("b");
    cfg.out = a.string();
    const auto ra = run_verify(cfg);
    cfg.out = b.string();
    const auto rb = run_verify(cfg);
    EXPECT_EQ(ra.status, 0);
    std::size_t files = 0;
    for (const auto& f : fs::directory_iterator(a)) {
        ++files;
        EXPECT_EQ(slurp(f.path()), slurp(b / f.path().filename())) << f.path();
    }
    EXPECT_GE(files, 2u);
    EXPECT_TRUE(fs::exists(a / "verify-summary.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Harness, GronwallRunOnIdenticalPair) {
    ExperimentConfig cfg;
    cfg.preset = "rotation";
    cfg.eps = 0.0;
    cfg.horizon = 0.2;
    cfg.grid_points = 5;
    const auto g = run_gronwall(cfg, false);
    for (const auto& r : g.series) EXPECT_LE(std::abs(r.E), 1e-10);
    EXPECT_EQ(g.table.rows.size(), g.series.size());
}

TEST(Harness, EvolveRunWritesTrajectory) {
    ExperimentConfig cfg;
    cfg.scene = kDir + "/dipole_chord.yaml";
    cfg.horizon = 0.1;
    cfg.dt = 0.05;
    cfg.markers = 64;
    const fs::path d = fresh_dir("evolve");
    cfg.out = d.string();
    const auto e = run_evolve(cfg);
    EXPECT_LT(e.area_drift, 1e-8);
    const Table t = read_csv(d / "trajectory.csv");
    EXPECT_EQ(t.kind, "trajectory");
    EXPECT_FALSE(t.rows.empty());
    fs::remove_all(d);
}

TEST(Harness, OutputDirectoryFromEnvironment) {
    ExperimentConfig cfg;
    ::setenv("CALIB_OUT_DIR", "/tmp/calib-env-dir", 1);
    EXPECT_EQ(output_dir(cfg), fs::path("/tmp/calib-env-dir"));
    cfg.out = "x";
    EXPECT_EQ(output_dir(cfg), fs::path("x"));
    ::unsetenv("CALIB_OUT_DIR");
}
