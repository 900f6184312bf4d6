// Exact sample-path simulation on a uniform grid.
//
// The one-step recursion
//   x1' = x1 + (mu1 + x2) tau + (mu2 + x3) tau^2/2 + mu3 tau^3/6 + J1 + jump1
//   x2' = x2 + (mu2 + x3) tau + mu3 tau^2/2 + J2 + jump2
//   x3' = x3 + mu3 tau + J3 + jump3
// with J ~ N(0, Q(tau)) reproduces the law of the continuous process at every
// grid epoch, whatever the step size. Jumps are applied once, on their own
// component, at the epoch they are scheduled for; the other components pick
// them up through later steps.
#pragma once

#include "clockforge/innovation.hpp"
#include "clockforge/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace clockforge {

struct SimulationGrid {
    double tau = 1.0;
    std::size_t n_steps = 1;

    [[nodiscard]] double epoch(std::size_t k) const noexcept {
        return static_cast<double>(k) * tau;
    }
    [[nodiscard]] double horizon() const noexcept { return epoch(n_steps); }

    /// Throws DomainError unless tau > 0 and n_steps >= 1.
    void check() const;
};

struct ClockState {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    std::size_t epoch_index = 0;
    double t = 0.0;

    [[nodiscard]] Vec3 vec() const noexcept { return {x1, x2, x3}; }
};

struct Trajectory {
    SimulationGrid grid;
    std::vector<ClockState> states; ///< n_steps + 1 entries, states[k].t == k * tau
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
};

struct Ensemble {
    SimulationGrid grid;
    AnomalySchedule schedule;
    std::uint64_t seed = 0;
    std::vector<Trajectory> trajectories; ///< trajectories[i].path_id == i
};

/// Sum of every jump that fires at one grid index.
struct IndexedJump {
    std::size_t index = 0;
    Vec3 add = Vec3::Zero();
};

/// Closed index range [first, last] of a variance window.
struct IndexedWindow {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] bool contains(std::size_t k) const noexcept { return first <= k && k <= last; }
};

/// Schedule with every epoch converted to an integer grid index.
struct NormalizedSchedule {
    std::vector<IndexedJump> jumps; ///< sorted by index, one entry per index
    std::vector<IndexedWindow> windows;

    [[nodiscard]] bool in_window(std::size_t k) const noexcept;
};

/// Maps theta to k with |theta - k tau| <= 1e-9 tau.
/// Throws MisalignedEpochError naming theta otherwise.
[[nodiscard]] std::size_t epoch_to_index(double theta, const SimulationGrid &grid);

/// Validates the schedule and converts its epochs to grid indices. Paired jumps
/// expand to +a/delta at theta0 and -a/delta at theta1 on x2.
[[nodiscard]] NormalizedSchedule validate_schedule(const AnomalySchedule &schedule,
                                                   const SimulationGrid &grid);

/// Copy of the schedule with every epoch replaced by k * tau for its grid index
/// k, so closed-form evaluations at grid epochs see exactly the same H(t - theta)
/// as the recursion's integer index comparisons.
[[nodiscard]] AnomalySchedule snap_to_grid(const AnomalySchedule &schedule,
                                           const SimulationGrid &grid);

/// One exact transition from t_k to t_k + tau.
[[nodiscard]] ClockState step(const ClockState &state, const ClockParameters &params, double tau,
                              const Vec3 &innovation, const Vec3 &jump_add) noexcept;

/// Validated scenario with its innovation factors built once. Safe to share
/// across threads; each run() owns its own RngStream.
class PathSimulator {
  public:
    PathSimulator(ClockParameters params, InitialState init, AnomalySchedule schedule,
                  SimulationGrid grid);

    [[nodiscard]] Trajectory run(std::uint64_t seed, std::uint64_t path_id) const;

    [[nodiscard]] const SimulationGrid &grid() const noexcept { return grid_; }
    [[nodiscard]] const AnomalySchedule &schedule() const noexcept { return schedule_; }
    [[nodiscard]] const NormalizedSchedule &normalized() const noexcept { return normalized_; }
    [[nodiscard]] const InnovationModel &nominal() const noexcept { return nominal_; }
    [[nodiscard]] const InnovationModel &burst() const noexcept { return burst_; }

  private:
    ClockParameters params_;
    InitialState init_;
    AnomalySchedule schedule_;
    SimulationGrid grid_;
    NormalizedSchedule normalized_;
    InnovationModel nominal_;
    InnovationModel burst_;
};

[[nodiscard]] Trajectory simulate_path(const ClockParameters &params, const InitialState &init,
                                       const AnomalySchedule &schedule, const SimulationGrid &grid,
                                       std::uint64_t seed, std::uint64_t path_id);

/// n_paths independent trajectories with path ids 0..n_paths-1. The result does
/// not depend on `threads` (0 = hardware concurrency).
[[nodiscard]] Ensemble simulate_ensemble(const ClockParameters &params, const InitialState &init,
                                         const AnomalySchedule &schedule,
                                         const SimulationGrid &grid, std::uint64_t seed,
                                         std::size_t n_paths, unsigned threads = 0);

} // namespace clockforge
