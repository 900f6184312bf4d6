#include "clockforge/cli.hpp"

#include "clockforge/csv.hpp"
#include "clockforge/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <cstdlib>
#include <optional>
#include <string>

namespace clockforge::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError(fmt::format("cannot create output directory '{}'", dir.string()));
    }
}

const std::vector<std::string> kCovNames{"11", "12", "13", "22", "23", "33"};
constexpr std::array<std::pair<int, int>, 6> kCovIndex{
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

std::vector<std::string> moments_header() {
    std::vector<std::string> h{"t"};
    for (const char *kind : {"analytic", "empirical"}) {
        for (int i = 1; i <= 3; ++i) {
            h.push_back(fmt::format("mean{}_{}", i, kind));
        }
    }
    for (const char *kind : {"analytic", "empirical"}) {
        for (const auto &n : kCovNames) {
            h.push_back(fmt::format("cov{}_{}", n, kind));
        }
    }
    return h;
}

void write_moments(const ScenarioConfig &cfg, const Ensemble &ens, const fs::path &file) {
    const AnomalySchedule snapped = snap_to_grid(cfg.schedule, cfg.grid);
    // With a burst the covariance has no closed form; those columns stay empty.
    const bool analytic_cov = cfg.schedule.variance_windows.empty();

    csv::Writer w(file, moments_header());
    std::vector<std::optional<double>> row;
    for (std::size_t k = 0; k <= cfg.grid.n_steps; ++k) {
        const double t = cfg.grid.epoch(k);
        const Vec3 mean = anomalous_mean(cfg.params, cfg.init, snapped, t);
        const MomentPair emp = empirical_moments(ens, k);
        row.assign(1, t);
        for (int i = 0; i < 3; ++i) {
            row.emplace_back(mean[i]);
        }
        for (int i = 0; i < 3; ++i) {
            row.emplace_back(emp.mean[i]);
        }
        const Mat3 cov = analytic_cov ? analytic_covariance(cfg.params, t) : Mat3::Zero();
        for (const auto &[i, j] : kCovIndex) {
            row.push_back(analytic_cov ? std::optional<double>(cov(i, j)) : std::nullopt);
        }
        for (const auto &[i, j] : kCovIndex) {
            row.emplace_back(emp.covariance(i, j));
        }
        w.row(row);
    }
    w.close();
}

} // namespace

unsigned thread_cap_from_env() {
    const char *raw = std::getenv("CLOCKFORGE_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    const std::string_view text(raw);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(
            fmt::format("CLOCKFORGE_THREADS must be a non-negative integer, got '{}'", text));
    }
    return value;
}

void run_simulate(const ScenarioConfig &cfg, const fs::path &out_dir, unsigned threads,
                  std::ostream &log) {
    validate_config(cfg);
    ensure_dir(out_dir);
    const Ensemble ens = simulate_ensemble(cfg.params, cfg.init, cfg.schedule, cfg.grid, cfg.seed,
                                           cfg.n_paths, threads);

    if (cfg.wants("paths")) {
        const std::vector<std::string> header{"t", "x1", "x2", "x3"};
        for (const auto &traj : ens.trajectories) {
            csv::Writer w(out_dir / fmt::format("path_{}.csv", traj.path_id), header);
            for (const auto &s : traj.states) {
                const std::array<double, 4> row{s.t, s.x1, s.x2, s.x3};
                w.row(row);
            }
            w.close();
        }
    }
    if (cfg.n_paths > 1 && cfg.wants("moments")) {
        write_moments(cfg, ens, out_dir / "ensemble_moments.csv");
    }
    fmt::print(log, "simulated {} path(s), {} steps of {} s, seed {} -> {}\n", cfg.n_paths,
               cfg.grid.n_steps, cfg.grid.tau, cfg.seed, out_dir.string());
}

std::vector<PredictionReport> run_predict(const ScenarioConfig &cfg, std::span<const double> epochs,
                                          double level, bool density, const fs::path &out_dir,
                                          std::ostream &log) {
    validate_config(cfg);
    if (epochs.empty()) {
        throw ConfigError("predict needs at least one epoch (--t or [run] t)");
    }
    std::vector<PredictionReport> reports;
    reports.reserve(epochs.size());
    for (double t : epochs) {
        reports.push_back(prediction_report(cfg.params, cfg.init, cfg.schedule, t, level));
    }

    ensure_dir(out_dir);
    {
        const std::vector<std::string> header{"t", "mean_x1", "std_x1", "lo", "hi", "level"};
        csv::Writer w(out_dir / "prediction.csv", header);
        for (const auto &r : reports) {
            const std::array<double, 6> row{r.t, r.mean_x1, r.std_x1, r.lo, r.hi,
                                            r.confidence_level};
            w.row(row);
        }
        w.close();
    }
    if (density) {
        constexpr int kPoints = 512;
        const std::vector<std::string> header{"t", "x1", "pdf"};
        csv::Writer w(out_dir / "density.csv", header);
        for (const auto &r : reports) {
            if (!(r.std_x1 > 0.0)) {
                fmt::print(log, "t={}: zero variance, no density emitted\n", r.t);
                continue;
            }
            const double lo = r.mean_x1 - 5.0 * r.std_x1;
            const double span = 10.0 * r.std_x1;
            for (int i = 0; i < kPoints; ++i) {
                const double x = lo + span * i / (kPoints - 1);
                const std::array<double, 3> row{
                    r.t, x, marginal_density(r.mean_x1, r.std_x1 * r.std_x1, x)};
                w.row(row);
            }
        }
        w.close();
    }
    for (const auto &r : reports) {
        fmt::print(log, "t={} s  mean_x1={:.6g} s  std_x1={:.6g} s  {:g}% interval [{:.6g}, {:.6g}] s\n",
                   r.t, r.mean_x1, r.std_x1, 100.0 * r.confidence_level, r.lo, r.hi);
    }
    return reports;
}

AllanEstimate run_allan(const ScenarioConfig &cfg, std::span<const double> taus,
                        const fs::path &out_dir, std::ostream &log) {
    validate_config(cfg);
    if (taus.empty()) {
        throw ConfigError("allan needs at least one averaging time (--tau or [run] taus)");
    }
    // Fail on a bad tau before spending time on the simulation.
    for (double tau : taus) {
        (void)epoch_to_index(tau, cfg.grid);
        if (!(tau > 0.0)) {
            throw MisalignedEpochError(fmt::format("averaging time must be > 0, got {}", tau), tau);
        }
    }
    ensure_dir(out_dir);
    const Trajectory traj =
        simulate_path(cfg.params, cfg.init, cfg.schedule, cfg.grid, cfg.seed, 0);
    const AllanEstimate est = allan_deviation(traj, taus);

    const std::vector<std::string> header{"tau", "adev", "n"};
    csv::Writer w(out_dir / "allan.csv", header);
    for (std::size_t i = 0; i < est.taus.size(); ++i) {
        const std::array<double, 3> row{est.taus[i], est.adev[i],
                                        static_cast<double>(est.n_samples_per_tau[i])};
        w.row(row);
        fmt::print(log, "tau={} s  adev={:.6g}  n={}\n", est.taus[i], est.adev[i],
                   est.n_samples_per_tau[i]);
    }
    w.close();
    return est;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"clockforge: atomic clock error simulation with anomalies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::vector<double> epochs;
    std::optional<double> level;
    bool density = false;
    std::vector<double> taus;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "Scenario config file")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Master seed (overrides [run] seed)");
    };

    auto *simulate = app.add_subcommand("simulate", "Simulate sample paths to CSV");
    add_common(simulate);
    simulate->add_option("--paths", paths, "Number of paths (overrides [run] n_paths)")
        ->check(CLI::PositiveNumber);

    auto *predict = app.add_subcommand("predict", "Analytic prediction error of x1");
    add_common(predict);
    predict->add_option("--t", epochs, "Prediction epochs in seconds, comma separated")
        ->delimiter(',');
    predict->add_option("--level", level, "Confidence level in (0, 1)");
    predict->add_flag("--density", density, "Also write density.csv (512-point pdf per epoch)");

    auto *allan = app.add_subcommand("allan", "Allan deviation of a simulated path");
    add_common(allan);
    allan->add_option("--tau", taus, "Averaging times in seconds, comma separated")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        ScenarioConfig cfg = load_config(config_path);
        if (paths) {
            cfg.n_paths = *paths;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (simulate->parsed()) {
            run_simulate(cfg, out_dir, thread_cap_from_env(), out);
        } else if (predict->parsed()) {
            const auto &ts = epochs.empty() ? cfg.predict_epochs : epochs;
            run_predict(cfg, ts, level.value_or(cfg.level), density || cfg.wants("density"),
                        out_dir, out);
        } else if (allan->parsed()) {
            run_allan(cfg, taus.empty() ? cfg.allan_taus : taus, out_dir, out);
        }
    } catch (const ConfigError &e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    } catch (const IoError &e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    } catch (const UnsupportedAnalyticError &e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitNumeric;
    } catch (const Error &e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitNumeric;
    }
    return kExitOk;
}

} // namespace clockforge::cli
