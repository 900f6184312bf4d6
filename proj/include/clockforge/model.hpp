// Three-state atomic clock error model: domain types and closed-form moments.
//
// State X = (x1, x2, x3):
//   x1  time deviation [s]
//   x2  random-walk frequency component [dimensionless]
//   x3  frequency drift [1/s]
//
// Dynamics:
//   dX1 = (X2 + mu1) dt + sigma1 dW1 + sum a1 dH(t - theta1)
//   dX2 = (X3 + mu2) dt + sigma2 dW2 + sum a2 dH(t - theta2)
//   dX3 =        mu3 dt + sigma3 dW3 + sum a3 dH(t - theta3)
//
// H is the Heaviside step with H(0) = 1, so a jump scheduled at theta is
// already visible at t = theta.
#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <vector>

namespace clockforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Diffusion coefficients (sigma1, sigma2, sigma3).
///   sigma1  white FM        [s / sqrt(s)]
///   sigma2  random-walk FM  [1 / sqrt(s)]
///   sigma3  drift noise     [1 / (s sqrt(s))]
struct Diffusion {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma3 = 0.0;
};

struct ClockParameters {
    double mu1 = 0.0; ///< constant fractional-frequency offset driving x1
    double mu2 = 0.0; ///< constant drift driving x2 [1/s]
    double mu3 = 0.0; ///< constant drift rate driving x3 [1/s^2]
    Diffusion sigma;
    /// Diffusion used inside variance windows. Present iff a window is scheduled.
    std::optional<Diffusion> burst;
};

struct InitialState {
    double c1 = 0.0; ///< phase deviation [s]
    double c2 = 0.0; ///< frequency deviation
    double c3 = 0.0; ///< drift [1/s]
};

enum class Component { phase = 0, frequency = 1, drift = 2 };

struct InstantJump {
    Component component = Component::phase;
    double amplitude = 0.0;
    double theta = 0.0;
};

/// Frequency step of +a/delta at theta0 undone at theta1 (delta = theta1 - theta0),
/// which accumulates a phase offset of exactly a.
struct PairedJump {
    double a = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;

    [[nodiscard]] double delta() const noexcept { return theta1 - theta0; }
    [[nodiscard]] double frequency_step() const noexcept { return a / delta(); }
};

/// Interval during which the burst diffusion replaces the nominal one.
struct VarianceWindow {
    double theta0 = 0.0;
    double theta1 = 0.0;
};

struct AnomalySchedule {
    std::vector<InstantJump> instant_jumps;
    std::vector<PairedJump> paired_jumps;
    std::vector<VarianceWindow> variance_windows;

    [[nodiscard]] bool empty() const noexcept {
        return instant_jumps.empty() && paired_jumps.empty() && variance_windows.empty();
    }
};

struct MomentPair {
    Vec3 mean = Vec3::Zero();
    Mat3 covariance = Mat3::Zero();
};

/// n-fold integral of the Heaviside step: t^n / n! for t >= 0, else 0.
[[nodiscard]] double heaviside_integral(double t, unsigned n = 0) noexcept;

/// Half-open window indicator 1_[a, b)(t) = H(t - a) - H(t - b).
/// Throws InvalidWindowError when b <= a.
[[nodiscard]] double window_indicator(double t, double a, double b);

/// Mean of the anomaly-free process at t >= 0.
[[nodiscard]] Vec3 analytic_mean(const ClockParameters &params, const InitialState &init,
                                 double t);

/// Covariance of the anomaly-free process at t >= 0.
[[nodiscard]] Mat3 analytic_covariance(const Diffusion &sigma, double t);
[[nodiscard]] Mat3 analytic_covariance(const ClockParameters &params, double t);

/// Mean with every scheduled instant and paired jump superposed on analytic_mean.
/// Variance windows do not move the mean.
[[nodiscard]] Vec3 anomalous_mean(const ClockParameters &params, const InitialState &init,
                                  const AnomalySchedule &schedule, double t);

/// Mean correction contributed by the jumps alone (anomalous_mean - analytic_mean).
[[nodiscard]] Vec3 jump_mean_correction(const AnomalySchedule &schedule, double t);

/// Checks the grid-independent schedule invariants: non-negative epochs,
/// theta1 > theta0, finite amplitudes, non-overlapping variance windows.
void check_schedule(const AnomalySchedule &schedule);

/// check_schedule plus: every sigma >= 0 and burst sigmas present iff a
/// variance window is scheduled.
void check_scenario(const ClockParameters &params, const AnomalySchedule &schedule);

} // namespace clockforge
