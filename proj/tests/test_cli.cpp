#include "clockforge/cli.hpp"
#include "clockforge/csv.hpp"
#include "clockforge/simulator.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace clockforge;
using testing_support::kScenarioDir;
using testing_support::slurp;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "clockforge");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

double cell(const csv::Table &t, std::size_t row, const std::string &col) {
    const auto it = std::find(t.header.begin(), t.header.end(), col);
    EXPECT_NE(it, t.header.end()) << col;
    return t.rows.at(row).at(static_cast<std::size_t>(it - t.header.begin())).value();
}

class EnvGuard {
  public:
    EnvGuard(const char *name, const char *value) : name_(name) {
        if (const char *old = std::getenv(name)) {
            old_ = old;
        }
        ::setenv(name, value, 1);
    }
    ~EnvGuard() {
        if (old_) {
            ::setenv(name_, old_->c_str(), 1);
        } else {
            ::unsetenv(name_);
        }
    }

  private:
    const char *name_;
    std::optional<std::string> old_;
};

const char *kNoiselessThreeJumps = R"(
[grid]
tau = 0.5
horizon = 8
[jump]
component = phase
amplitude = 3
theta = 6
[jump]
component = frequency
amplitude = 3
theta = 4
[jump]
component = drift
amplitude = 3
theta = 2
)";

} // namespace

// =============================================================================
// simulate
// =============================================================================

TEST(CliSimulate, NoiselessThreeJumpScenario) {
    TempDir dir;
    write_file(dir / "three.cfg", kNoiselessThreeJumps);
    const auto r = run_cli({"simulate", "--config", (dir / "three.cfg").string(), "--out",
                            (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = csv::read(dir / "out" / "path_0.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "x1", "x2", "x3"}));
    ASSERT_EQ(t.rows.size(), 17U);
    // Own-component step of 3 at each jump epoch: x3 at t=2 (row 4), x2 at t=4
    // (row 8, on top of the drift ramp 3*tau), x1 at t=6 (row 12).
    EXPECT_EQ(cell(t, 4, "x3") - cell(t, 3, "x3"), 3.0);
    EXPECT_DOUBLE_EQ(cell(t, 8, "x2") - cell(t, 7, "x2"), 3.0 + 3.0 * 0.5);
    const double dx1_before = cell(t, 11, "x1") - cell(t, 10, "x1");
    const double dx1_at = cell(t, 12, "x1") - cell(t, 11, "x1");
    const double dx1_after = cell(t, 13, "x1") - cell(t, 12, "x1");
    EXPECT_NEAR(dx1_at - 3.0, 0.5 * (dx1_before + dx1_after), 1e-12);
    EXPECT_FALSE(std::filesystem::exists(dir / "out" / "ensemble_moments.csv"));
}

TEST(CliSimulate, ConstantSolutionRows) {
    TempDir dir;
    write_file(dir / "c.cfg", "[init]\nc1 = 1\n[grid]\ntau = 1\nn_steps = 12\n");
    ASSERT_EQ(run_cli({"simulate", "--config", (dir / "c.cfg").string(), "--out", dir.path().string()}).code, 0);
    const auto t = csv::read(dir / "path_0.csv");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(cell(t, i, "x1"), 1.0);
        EXPECT_EQ(cell(t, i, "x2"), 0.0);
        EXPECT_EQ(cell(t, i, "x3"), 0.0);
    }
    EXPECT_NE(slurp(dir / "path_0.csv").find("t,x1,x2,x3\r\n0,1,0,0\r\n"), std::string::npos);
}

TEST(CliSimulate, VarianceBurstScenarioFiles) {
    TempDir dir;
    const auto r = run_cli({"simulate", "--config", (kScenarioDir / "variance_burst.cfg").string(),
                            "--out", dir.path().string(), "--paths", "400"});
    ASSERT_EQ(r.code, 0) << r.err;
    // Ratio of x3-increment variances inside/outside the window, from the CSVs.
    double in_sum = 0, out_sum = 0;
    std::size_t in_n = 0, out_n = 0;
    for (int p = 0; p < 400; ++p) {
        const auto t = csv::read(dir / ("path_" + std::to_string(p) + ".csv"));
        for (std::size_t k = 1; k < t.rows.size(); ++k) {
            const double d = cell(t, k, "x3") - cell(t, k - 1, "x3");
            const double tk = cell(t, k, "t");
            if (tk >= 4.0 - 1e-9 && tk <= 8.0 + 1e-9) {
                in_sum += d * d;
                ++in_n;
            } else {
                out_sum += d * d;
                ++out_n;
            }
        }
    }
    const double ratio = (in_sum / in_n) / (out_sum / out_n);
    EXPECT_GE(ratio, 40.0);
    EXPECT_LE(ratio, 100.0);

    const auto m = csv::read(dir / "ensemble_moments.csv");
    ASSERT_EQ(m.rows.size(), 241U);
    ASSERT_EQ(m.header.size(), 19U);
    EXPECT_EQ(m.header[7], "cov11_analytic");
    EXPECT_FALSE(m.rows[10][7].has_value()); // analytic covariance left empty with a burst
    EXPECT_TRUE(m.rows[10][13].has_value());
}

TEST(CliSimulate, RoundTripIsLossless) {
    TempDir dir;
    const auto cfg_path = kScenarioDir / "drift_jump.cfg";
    ASSERT_EQ(run_cli({"simulate", "--config", cfg_path.string(), "--out", dir.path().string(),
                       "--seed", "77", "--paths", "3"})
                  .code,
              0);
    const auto cfg = load_config(cfg_path);
    for (std::uint64_t p = 0; p < 3; ++p) {
        const auto traj = simulate_path(cfg.params, cfg.init, cfg.schedule, cfg.grid, 77, p);
        const auto t = csv::read(dir / ("path_" + std::to_string(p) + ".csv"));
        ASSERT_EQ(t.rows.size(), traj.states.size());
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const auto &s = traj.states[k];
            ASSERT_EQ(*t.rows[k][0], s.t);
            ASSERT_EQ(*t.rows[k][1], s.x1);
            ASSERT_EQ(*t.rows[k][2], s.x2);
            ASSERT_EQ(*t.rows[k][3], s.x3);
        }
    }
}

TEST(CliSimulate, IdempotentAcrossThreadCounts) {
    TempDir a;
    TempDir b;
    const auto cfg = (kScenarioDir / "paired_jump.cfg").string();
    {
        EnvGuard env("CLOCKFORGE_THREADS", "1");
        ASSERT_EQ(run_cli({"simulate", "--config", cfg, "--out", a.path().string(), "--paths", "12"}).code, 0);
    }
    {
        EnvGuard env("CLOCKFORGE_THREADS", "5");
        ASSERT_EQ(run_cli({"simulate", "--config", cfg, "--out", b.path().string(), "--paths", "12"}).code, 0);
    }
    for (const auto &entry : std::filesystem::directory_iterator(a.path())) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(entry.path()), slurp(b.path() / name)) << name;
    }
}

TEST(CliSimulate, BadThreadEnvIsUsageError) {
    TempDir dir;
    EnvGuard env("CLOCKFORGE_THREADS", "many");
    EXPECT_EQ(run_cli({"simulate", "--config", (kScenarioDir / "paired_jump.cfg").string(),
                       "--out", dir.path().string()})
                  .code,
              cli::kExitUsage);
}

// =============================================================================
// predict
// =============================================================================

TEST(CliPredict, RafsBaseInterval) {
    TempDir dir;
    const auto r = run_cli({"predict", "--config", (kScenarioDir / "rafs.cfg").string(), "--out",
                            dir.path().string(), "--t", "0,6000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = csv::read(dir / "prediction.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "mean_x1", "std_x1", "lo", "hi", "level"}));
    ASSERT_EQ(t.rows.size(), 2U);
    EXPECT_EQ(cell(t, 0, "mean_x1"), 0.0);
    EXPECT_EQ(cell(t, 0, "lo"), cell(t, 0, "hi"));
    EXPECT_NEAR(cell(t, 1, "hi") - cell(t, 1, "lo"), 1.52e-9, 0.01 * 1.52e-9);
    EXPECT_EQ(cell(t, 1, "level"), 0.95);
    EXPECT_NE(r.out.find("t=6000"), std::string::npos);
}

TEST(CliPredict, JumpAtHundredConfiguredEpochs) {
    TempDir dir;
    const auto r = run_cli({"predict", "--config", (kScenarioDir / "rafs_jump100.cfg").string(),
                            "--out", dir.path().string(), "--density"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = csv::read(dir / "prediction.csv");
    ASSERT_EQ(t.rows.size(), 4U);
    EXPECT_DOUBLE_EQ(cell(t, 3, "t"), 9000.0);
    EXPECT_DOUBLE_EQ(cell(t, 3, "mean_x1"), 8.9e-9);
    EXPECT_DOUBLE_EQ(cell(t, 2, "mean_x1"), 5.9e-9);

    const auto d = csv::read(dir / "density.csv");
    EXPECT_EQ(d.rows.size(), 4U * 512U);
    // First point of each block sits at mean - 5 std; the midpoint pair brackets the peak.
    EXPECT_NEAR(cell(d, 1024, "x1"), cell(t, 2, "mean_x1") - 5 * cell(t, 2, "std_x1"), 1e-20);
    EXPECT_GT(cell(d, 1024 + 255, "pdf"), cell(d, 1024 + 10, "pdf"));
}

TEST(CliPredict, LevelOverride) {
    TempDir dir;
    ASSERT_EQ(run_cli({"predict", "--config", (kScenarioDir / "rafs.cfg").string(), "--out",
                       dir.path().string(), "--t", "6000", "--level", "0.99"})
                  .code,
              0);
    const auto t = csv::read(dir / "prediction.csv");
    EXPECT_NEAR(cell(t, 0, "hi") - cell(t, 0, "mean_x1"), 2.576 * cell(t, 0, "std_x1"), 1e-22);
}

TEST(CliPredict, VarianceWindowAdvisesMonteCarlo) {
    TempDir dir;
    const auto r = run_cli({"predict", "--config", (kScenarioDir / "variance_burst.cfg").string(),
                            "--out", dir.path().string(), "--t", "10"});
    EXPECT_EQ(r.code, cli::kExitNumeric);
    EXPECT_NE(r.err.find("Monte Carlo"), std::string::npos);
}

TEST(CliPredict, NeedsEpochs) {
    TempDir dir;
    EXPECT_EQ(run_cli({"predict", "--config", (kScenarioDir / "paired_jump.cfg").string(),
                       "--out", dir.path().string()})
                  .code,
              cli::kExitUsage);
}

// =============================================================================
// allan
// =============================================================================

TEST(CliAllan, RafsWhiteFm) {
    TempDir dir;
    const auto r = run_cli({"allan", "--config", (kScenarioDir / "rafs.cfg").string(), "--out",
                            dir.path().string(), "--tau", "1,10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = csv::read(dir / "allan.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"tau", "adev", "n"}));
    EXPECT_NEAR(cell(t, 0, "adev"), 5e-12, 0.2 * 5e-12);
    EXPECT_NEAR(cell(t, 1, "adev"), 5e-12 / std::sqrt(10.0), 0.25 * 5e-12 / std::sqrt(10.0));
    EXPECT_EQ(cell(t, 0, "n"), 8999.0);
}

TEST(CliAllan, ZeroNoiseIsNegligible) {
    TempDir dir;
    write_file(dir / "z.cfg", "[params]\nmu1 = 1e-9\n[grid]\ntau = 1\nn_steps = 100\n[run]\ntaus = 1, 2, 10\n");
    ASSERT_EQ(run_cli({"allan", "--config", (dir / "z.cfg").string(), "--out", dir.path().string()}).code, 0);
    const auto t = csv::read(dir / "allan.csv");
    ASSERT_EQ(t.rows.size(), 3U);
    for (std::size_t i = 0; i < 3; ++i) {
        // Only rounding of the accumulated ramp remains.
        EXPECT_LT(cell(t, i, "adev"), 1e-20);
    }
}

TEST(CliAllan, MisalignedTau) {
    TempDir dir;
    const auto r = run_cli({"allan", "--config", (kScenarioDir / "rafs.cfg").string(), "--out",
                            dir.path().string(), "--tau", "1.5"});
    EXPECT_EQ(r.code, cli::kExitNumeric);
    EXPECT_FALSE(std::filesystem::exists(dir / "allan.csv"));
}

// =============================================================================
// Exit codes and diagnostics
// =============================================================================

TEST(CliErrors, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"simulate"}).code, cli::kExitUsage); // --config required
    EXPECT_EQ(run_cli({"simulate", "--config", "/nonexistent.cfg"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST(CliErrors, MalformedConfigReportsLine) {
    TempDir dir;
    write_file(dir / "bad.cfg", "[grid]\ntau = 1\nn_steps = 3\nsigma1 = 2\n");
    const auto r = run_cli({"simulate", "--config", (dir / "bad.cfg").string(), "--out", dir.path().string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("sigma1"), std::string::npos) << r.err;
}

TEST(CliErrors, MisalignedEpochNamesTheta) {
    TempDir dir;
    write_file(dir / "m.cfg", "[grid]\ntau = 0.5\nn_steps = 10\n[jump]\ncomponent = drift\namplitude = 1\ntheta = 2.3\n");
    const auto r = run_cli({"simulate", "--config", (dir / "m.cfg").string(), "--out", dir.path().string()});
    EXPECT_EQ(r.code, cli::kExitNumeric);
    EXPECT_NE(r.err.find("theta=2.3"), std::string::npos) << r.err;
}
