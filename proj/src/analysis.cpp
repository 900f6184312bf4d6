#include "clockforge/analysis.hpp"

#include "clockforge/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace clockforge {

double z_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError(fmt::format("confidence level must lie in (0, 1), got {}", level));
    }
    static constexpr std::array<std::pair<double, double>, 3> kConventional{
        {{0.68, 1.0}, {0.95, 1.96}, {0.99, 2.576}}};
    for (const auto &[l, z] : kConventional) {
        if (std::abs(level - l) < 1e-12) {
            return z;
        }
    }
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 0.5 + level / 2.0);
}

double marginal_density(double mean, double variance, double x) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw DomainError(fmt::format("density needs variance > 0, got {}", variance));
    }
    const double u = (x - mean);
    return std::exp(-0.5 * u * u / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

PredictionReport prediction_report(const ClockParameters &params, const InitialState &init,
                                   const AnomalySchedule &schedule, double t, double level) {
    check_scenario(params, schedule);
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError(fmt::format("prediction epoch must be finite and >= 0, got {}", t));
    }
    for (const auto &w : schedule.variance_windows) {
        if (w.theta0 <= t) {
            throw UnsupportedAnalyticError(fmt::format(
                "variance window [{}, {}] intersects [0, {}]: no closed-form covariance, "
                "use Monte Carlo (simulate + ensemble moments)",
                w.theta0, w.theta1, t));
        }
    }

    PredictionReport r;
    r.t = t;
    r.confidence_level = level;
    r.z = z_quantile(level);
    r.mean_x1 = anomalous_mean(params, init, schedule, t)[0];
    r.std_x1 = std::sqrt(analytic_covariance(params, t)(0, 0));
    const double half = r.z * r.std_x1;
    r.lo = r.mean_x1 - half;
    r.hi = r.mean_x1 + half;
    r.schedule_summary = summarize(schedule);
    return r;
}

MomentPair empirical_moments(std::span<const Vec3> samples) {
    if (samples.size() < 2) {
        throw InsufficientDataError(
            fmt::format("need at least 2 paths for moments, got {}", samples.size()));
    }
    // Shifted two-pass: identical samples give their exact value and zero covariance.
    const Vec3 shift = samples.front();
    Vec3 acc = Vec3::Zero();
    for (const auto &s : samples) {
        acc += s - shift;
    }
    const auto n = static_cast<double>(samples.size());
    MomentPair out;
    out.mean = shift + acc / n;

    Mat3 cov = Mat3::Zero();
    for (const auto &s : samples) {
        const Vec3 d = s - out.mean;
        cov += d * d.transpose();
    }
    out.covariance = cov / (n - 1.0);
    return out;
}

MomentPair empirical_moments(const Ensemble &ensemble, std::size_t epoch_index) {
    if (epoch_index > ensemble.grid.n_steps) {
        throw DomainError(fmt::format("epoch index {} outside grid of {} steps", epoch_index,
                                      ensemble.grid.n_steps));
    }
    std::vector<Vec3> samples;
    samples.reserve(ensemble.trajectories.size());
    for (const auto &traj : ensemble.trajectories) {
        samples.push_back(traj.states.at(epoch_index).vec());
    }
    return empirical_moments(samples);
}

AllanEstimate allan_deviation(std::span<const double> x1, double tau0,
                              std::span<const double> taus) {
    if (!(tau0 > 0.0)) {
        throw DomainError(fmt::format("sample spacing must be > 0, got {}", tau0));
    }
    AllanEstimate est;
    for (double tau : taus) {
        const double m_real = std::round(tau / tau0);
        if (!std::isfinite(tau) || m_real < 1.0 || std::abs(tau - m_real * tau0) > 1e-9 * tau0) {
            throw MisalignedEpochError(
                fmt::format("averaging time {} is not a positive multiple of the grid step {}",
                            tau, tau0),
                tau);
        }
        const auto m = static_cast<std::size_t>(m_real);
        if (x1.size() < 2 * m + 1) {
            throw InsufficientDataError(fmt::format(
                "averaging time {} needs at least {} samples, have {}", tau, 2 * m + 1, x1.size()));
        }
        const std::size_t n = x1.size() - 2 * m;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = x1[i + 2 * m] - 2.0 * x1[i + m] + x1[i];
            sum += d2 * d2;
        }
        const double tau_m = m_real * tau0;
        est.taus.push_back(tau_m);
        est.adev.push_back(std::sqrt(sum / (2.0 * tau_m * tau_m * static_cast<double>(n))));
        est.n_samples_per_tau.push_back(n);
    }
    return est;
}

AllanEstimate allan_deviation(const Trajectory &trajectory, std::span<const double> taus) {
    std::vector<double> x1;
    x1.reserve(trajectory.states.size());
    for (const auto &s : trajectory.states) {
        x1.push_back(s.x1);
    }
    return allan_deviation(x1, trajectory.grid.tau, taus);
}

std::string summarize(const AnomalySchedule &schedule) {
    if (schedule.empty()) {
        return "none";
    }
    static constexpr std::array<const char *, 3> kNames{"phase", "freq", "drift"};
    std::string out;
    auto sep = [&out] {
        if (!out.empty()) {
            out += "; ";
        }
    };
    for (const auto &j : schedule.instant_jumps) {
        sep();
        out += fmt::format("{}@{}:{}", kNames[static_cast<int>(j.component)], j.theta, j.amplitude);
    }
    for (const auto &pj : schedule.paired_jumps) {
        sep();
        out += fmt::format("paired[{},{}]:{}", pj.theta0, pj.theta1, pj.a);
    }
    for (const auto &w : schedule.variance_windows) {
        sep();
        out += fmt::format("window[{},{}]", w.theta0, w.theta1);
    }
    return out;
}

} // namespace clockforge
