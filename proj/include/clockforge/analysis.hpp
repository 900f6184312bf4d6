// Prediction reports, marginal densities, ensemble moments and Allan deviation.
#pragma once

#include "clockforge/model.hpp"
#include "clockforge/simulator.hpp"

#include <span>
#include <string>
#include <vector>

namespace clockforge {

struct PredictionReport {
    double t = 0.0;
    double mean_x1 = 0.0;
    double std_x1 = 0.0;
    double confidence_level = 0.95;
    double z = 1.96;
    double lo = 0.0;
    double hi = 0.0;
    std::string schedule_summary;
};

struct AllanEstimate {
    std::vector<double> taus;
    std::vector<double> adev;
    std::vector<std::size_t> n_samples_per_tau;
};

/// Two-sided Normal quantile for a confidence level in (0, 1).
/// 0.68, 0.95 and 0.99 map to the conventional 1.0, 1.96 and 2.576;
/// other levels use the exact inverse CDF.
[[nodiscard]] double z_quantile(double level);

/// N(mean, variance) density at x. Throws DomainError for variance <= 0.
[[nodiscard]] double marginal_density(double mean, double variance, double x);

/// Mean, standard deviation and mean +- z std interval of x1 at t.
/// Throws UnsupportedAnalyticError when a variance window starts at or before t:
/// there is no closed-form covariance once a burst has been accumulated, use
/// empirical_moments on a simulated ensemble instead.
[[nodiscard]] PredictionReport prediction_report(const ClockParameters &params,
                                                 const InitialState &init,
                                                 const AnomalySchedule &schedule, double t,
                                                 double level = 0.95);

/// Sample mean and unbiased sample covariance across paths at one grid index.
[[nodiscard]] MomentPair empirical_moments(const Ensemble &ensemble, std::size_t epoch_index);
[[nodiscard]] MomentPair empirical_moments(std::span<const Vec3> samples);

/// Overlapping Allan deviation of x1 samples spaced tau0 apart:
///   sigma_y^2(tau) = <(x[i+2m] - 2 x[i+m] + x[i])^2> / (2 tau^2),  tau = m tau0.
[[nodiscard]] AllanEstimate allan_deviation(std::span<const double> x1, double tau0,
                                            std::span<const double> taus);
[[nodiscard]] AllanEstimate allan_deviation(const Trajectory &trajectory,
                                            std::span<const double> taus);

/// Short human-readable description, e.g. "freq@100:1e-12; window[4,8]".
[[nodiscard]] std::string summarize(const AnomalySchedule &schedule);

} // namespace clockforge
