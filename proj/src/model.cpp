#include "clockforge/model.hpp"

#include "clockforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clockforge {

double heaviside_integral(double t, unsigned n) noexcept {
    if (t < 0.0) {
        return 0.0;
    }
    double value = 1.0;
    for (unsigned k = 1; k <= n; ++k) {
        value *= t / static_cast<double>(k);
    }
    return value;
}

double window_indicator(double t, double a, double b) {
    if (!(b > a)) {
        throw InvalidWindowError("window requires b > a, got [" + std::to_string(a) + ", " +
                                 std::to_string(b) + ")");
    }
    return heaviside_integral(t - a) - heaviside_integral(t - b);
}

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and >= 0, got " + std::to_string(t));
    }
}

} // namespace

Vec3 analytic_mean(const ClockParameters &p, const InitialState &c, double t) {
    require_time(t);
    const double t2 = t * t / 2.0;
    const double t3 = t * t * t / 6.0;
    return {c.c1 + (c.c2 + p.mu1) * t + (c.c3 + p.mu2) * t2 + p.mu3 * t3,
            c.c2 + (c.c3 + p.mu2) * t + p.mu3 * t2, c.c3 + p.mu3 * t};
}

Mat3 analytic_covariance(const Diffusion &sigma, double t) {
    require_time(t);
    const double s1 = sigma.sigma1 * sigma.sigma1;
    const double s2 = sigma.sigma2 * sigma.sigma2;
    const double s3 = sigma.sigma3 * sigma.sigma3;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double t5 = t4 * t;

    const double c11 = s1 * t + s2 * t3 / 3.0 + s3 * t5 / 20.0;
    const double c12 = s2 * t2 / 2.0 + s3 * t4 / 8.0;
    const double c13 = s3 * t3 / 6.0;
    const double c22 = s2 * t + s3 * t3 / 3.0;
    const double c23 = s3 * t2 / 2.0;
    const double c33 = s3 * t;

    Mat3 m;
    m << c11, c12, c13, //
        c12, c22, c23,  //
        c13, c23, c33;
    return m;
}

Mat3 analytic_covariance(const ClockParameters &params, double t) {
    return analytic_covariance(params.sigma, t);
}

Vec3 jump_mean_correction(const AnomalySchedule &schedule, double t) {
    Vec3 out = Vec3::Zero();
    for (const auto &j : schedule.instant_jumps) {
        const double u = t - j.theta;
        if (u < 0.0) {
            continue;
        }
        switch (j.component) {
        case Component::phase:
            out[0] += j.amplitude;
            break;
        case Component::frequency:
            out[0] += j.amplitude * heaviside_integral(u, 1);
            out[1] += j.amplitude;
            break;
        case Component::drift:
            out[0] += j.amplitude * heaviside_integral(u, 2);
            out[1] += j.amplitude * heaviside_integral(u, 1);
            out[2] += j.amplitude;
            break;
        }
    }
    for (const auto &pj : schedule.paired_jumps) {
        const double step = pj.frequency_step();
        const double inside = window_indicator(t, pj.theta0, pj.theta1);
        out[0] += pj.a * heaviside_integral(t - pj.theta1) + step * (t - pj.theta0) * inside;
        out[1] += step * inside;
    }
    return out;
}

Vec3 anomalous_mean(const ClockParameters &params, const InitialState &init,
                    const AnomalySchedule &schedule, double t) {
    check_schedule(schedule);
    Vec3 mean = analytic_mean(params, init, t);
    if (schedule.instant_jumps.empty() && schedule.paired_jumps.empty()) {
        return mean;
    }
    const Vec3 correction = jump_mean_correction(schedule, t);
    for (int i = 0; i < 3; ++i) {
        if (correction[i] != 0.0) {
            mean[i] += correction[i];
        }
    }
    return mean;
}

namespace {

void check_epoch(double theta, const char *what) {
    if (!std::isfinite(theta) || theta < 0.0) {
        throw ScheduleError(std::string(what) + " must be finite and >= 0, got " +
                            std::to_string(theta));
    }
}

void check_interval(double theta0, double theta1, const char *what) {
    check_epoch(theta0, what);
    check_epoch(theta1, what);
    if (!(theta1 > theta0)) {
        throw ScheduleError(std::string(what) + " requires theta1 > theta0, got [" +
                            std::to_string(theta0) + ", " + std::to_string(theta1) + "]");
    }
}

void check_diffusion(const Diffusion &d, const char *what) {
    for (double s : {d.sigma1, d.sigma2, d.sigma3}) {
        if (!std::isfinite(s) || s < 0.0) {
            throw ScheduleError(std::string(what) + " sigmas must be finite and >= 0, got " +
                                std::to_string(s));
        }
    }
}

} // namespace

void check_schedule(const AnomalySchedule &schedule) {
    for (const auto &j : schedule.instant_jumps) {
        check_epoch(j.theta, "instant jump epoch");
        if (!std::isfinite(j.amplitude)) {
            throw ScheduleError("instant jump amplitude must be finite");
        }
    }
    for (const auto &pj : schedule.paired_jumps) {
        check_interval(pj.theta0, pj.theta1, "paired jump");
        if (!std::isfinite(pj.a)) {
            throw ScheduleError("paired jump amplitude must be finite");
        }
    }
    for (const auto &w : schedule.variance_windows) {
        check_interval(w.theta0, w.theta1, "variance window");
    }

    // Closed windows: sharing an endpoint is an overlap.
    std::vector<VarianceWindow> windows = schedule.variance_windows;
    std::sort(windows.begin(), windows.end(),
              [](const auto &l, const auto &r) { return l.theta0 < r.theta0; });
    for (std::size_t i = 1; i < windows.size(); ++i) {
        if (windows[i].theta0 <= windows[i - 1].theta1) {
            throw ScheduleError("variance windows overlap: [" + std::to_string(windows[i - 1].theta0) +
                                ", " + std::to_string(windows[i - 1].theta1) + "] and [" +
                                std::to_string(windows[i].theta0) + ", " +
                                std::to_string(windows[i].theta1) + "]");
        }
    }
}

void check_scenario(const ClockParameters &params, const AnomalySchedule &schedule) {
    check_schedule(schedule);
    check_diffusion(params.sigma, "diffusion");
    if (params.burst) {
        check_diffusion(*params.burst, "burst");
    }
    const bool has_window = !schedule.variance_windows.empty();
    if (has_window && !params.burst) {
        throw ScheduleError("variance window scheduled but burst sigmas (sigma1p..sigma3p) missing");
    }
    if (!has_window && params.burst) {
        throw ScheduleError("burst sigmas given without a variance window");
    }
}

} // namespace clockforge
