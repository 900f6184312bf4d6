#include "clockforge/simulator.hpp"

#include "clockforge/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <thread>

namespace clockforge {

void SimulationGrid::check() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError(fmt::format("grid step must be finite and > 0, got {}", tau));
    }
    if (n_steps < 1) {
        throw DomainError("grid needs at least one step");
    }
}

bool NormalizedSchedule::in_window(std::size_t k) const noexcept {
    return std::any_of(windows.begin(), windows.end(),
                       [k](const IndexedWindow &w) { return w.contains(k); });
}

std::size_t epoch_to_index(double theta, const SimulationGrid &grid) {
    grid.check();
    if (!std::isfinite(theta) || theta < 0.0) {
        throw ScheduleError(fmt::format("epoch must be finite and >= 0, got {}", theta));
    }
    const double k = std::round(theta / grid.tau);
    if (std::abs(theta - k * grid.tau) > 1e-9 * grid.tau) {
        throw MisalignedEpochError(
            fmt::format("epoch theta={} is not on the sampling grid (tau={})", theta, grid.tau),
            theta);
    }
    return static_cast<std::size_t>(k);
}

NormalizedSchedule validate_schedule(const AnomalySchedule &schedule, const SimulationGrid &grid) {
    grid.check();
    check_schedule(schedule);

    std::map<std::size_t, Vec3> adds;
    auto add = [&](std::size_t k, int component, double value) {
        auto [it, inserted] = adds.try_emplace(k, Vec3::Zero());
        it->second[component] += value;
    };
    for (const auto &j : schedule.instant_jumps) {
        add(epoch_to_index(j.theta, grid), static_cast<int>(j.component), j.amplitude);
    }
    for (const auto &pj : schedule.paired_jumps) {
        const std::size_t k0 = epoch_to_index(pj.theta0, grid);
        const std::size_t k1 = epoch_to_index(pj.theta1, grid);
        add(k0, 1, pj.frequency_step());
        add(k1, 1, -pj.frequency_step());
    }

    NormalizedSchedule out;
    out.jumps.reserve(adds.size());
    for (const auto &[k, v] : adds) {
        out.jumps.push_back({k, v});
    }
    for (const auto &w : schedule.variance_windows) {
        out.windows.push_back({epoch_to_index(w.theta0, grid), epoch_to_index(w.theta1, grid)});
    }
    return out;
}

AnomalySchedule snap_to_grid(const AnomalySchedule &schedule, const SimulationGrid &grid) {
    AnomalySchedule out = schedule;
    auto snap = [&grid](double &theta) { theta = grid.epoch(epoch_to_index(theta, grid)); };
    for (auto &j : out.instant_jumps) {
        snap(j.theta);
    }
    for (auto &pj : out.paired_jumps) {
        snap(pj.theta0);
        snap(pj.theta1);
    }
    for (auto &w : out.variance_windows) {
        snap(w.theta0);
        snap(w.theta1);
    }
    return out;
}

ClockState step(const ClockState &s, const ClockParameters &p, double tau, const Vec3 &innovation,
                const Vec3 &jump_add) noexcept {
    const double tau2 = tau * tau / 2.0;
    const double tau3 = tau * tau * tau / 6.0;
    ClockState next;
    next.x1 = s.x1 + (p.mu1 + s.x2) * tau + (p.mu2 + s.x3) * tau2 + p.mu3 * tau3 + innovation[0] +
              jump_add[0];
    next.x2 = s.x2 + (p.mu2 + s.x3) * tau + p.mu3 * tau2 + innovation[1] + jump_add[1];
    next.x3 = s.x3 + p.mu3 * tau + innovation[2] + jump_add[2];
    next.epoch_index = s.epoch_index + 1;
    next.t = static_cast<double>(next.epoch_index) * tau;
    return next;
}

PathSimulator::PathSimulator(ClockParameters params, InitialState init, AnomalySchedule schedule,
                             SimulationGrid grid)
    : params_(std::move(params)), init_(init), schedule_(std::move(schedule)), grid_(grid) {
    check_scenario(params_, schedule_);
    normalized_ = validate_schedule(schedule_, grid_);
    nominal_ = InnovationModel::build(params_.sigma, grid_.tau);
    burst_ = params_.burst ? InnovationModel::build(*params_.burst, grid_.tau) : nominal_;
}

Trajectory PathSimulator::run(std::uint64_t seed, std::uint64_t path_id) const {
    Trajectory traj;
    traj.grid = grid_;
    traj.seed = seed;
    traj.path_id = path_id;
    traj.states.reserve(grid_.n_steps + 1);

    ClockState state{init_.c1, init_.c2, init_.c3, 0, 0.0};
    auto next_jump = normalized_.jumps.begin();
    // A jump at index 0 has no preceding transition: it lands on the initial state.
    if (next_jump != normalized_.jumps.end() && next_jump->index == 0) {
        state.x1 += next_jump->add[0];
        state.x2 += next_jump->add[1];
        state.x3 += next_jump->add[2];
        ++next_jump;
    }
    traj.states.push_back(state);

    RngStream stream(seed, path_id);
    const Vec3 no_jump = Vec3::Zero();
    for (std::size_t k = 0; k < grid_.n_steps; ++k) {
        const std::size_t target = k + 1;
        const InnovationModel &model = normalized_.in_window(target) ? burst_ : nominal_;
        const Vec3 innovation = sample_innovation(model, stream);
        const Vec3 *jump = &no_jump;
        if (next_jump != normalized_.jumps.end() && next_jump->index == target) {
            jump = &next_jump->add;
            ++next_jump;
        }
        state = step(state, params_, grid_.tau, innovation, *jump);
        traj.states.push_back(state);
    }
    return traj;
}

Trajectory simulate_path(const ClockParameters &params, const InitialState &init,
                         const AnomalySchedule &schedule, const SimulationGrid &grid,
                         std::uint64_t seed, std::uint64_t path_id) {
    return PathSimulator(params, init, schedule, grid).run(seed, path_id);
}

Ensemble simulate_ensemble(const ClockParameters &params, const InitialState &init,
                           const AnomalySchedule &schedule, const SimulationGrid &grid,
                           std::uint64_t seed, std::size_t n_paths, unsigned threads) {
    if (n_paths < 1) {
        throw DomainError("ensemble needs at least one path");
    }
    const PathSimulator sim(params, init, schedule, grid);

    Ensemble ens;
    ens.grid = grid;
    ens.schedule = schedule;
    ens.seed = seed;
    ens.trajectories.resize(n_paths);

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_paths));

    // Each slot is written by exactly one worker; the output is independent of
    // the thread count because path i always uses stream (seed, i).
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_paths; i = next.fetch_add(1)) {
            ens.trajectories[i] = sim.run(seed, i);
        }
    };
    if (threads <= 1) {
        worker();
        return ens;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    pool.clear();
    return ens;
}

} // namespace clockforge
