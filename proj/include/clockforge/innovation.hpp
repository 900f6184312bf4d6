// Per-step innovation covariance, its Cholesky factor, and reproducible
// correlated Gaussian sampling.
#pragma once

#include "clockforge/model.hpp"

#include <cstdint>

namespace clockforge {

/// Covariance Q of the exact one-step innovation over a step of length tau.
/// Same polynomial as the process covariance evaluated at t = tau.
[[nodiscard]] Mat3 innovation_covariance(const Diffusion &sigma, double tau);

/// Lower-triangular A with A * A^T = q. Semidefinite input is accepted: a pivot
/// below 1e-14 * q_jj zeroes column j instead of failing.
///
/// Throws ShapeError if q is not symmetric to 1e-12 (relative to max |q_ij|),
/// NotPsdError if a pivot is negative beyond the tolerance.
[[nodiscard]] Mat3 cholesky_lower(const Mat3 &q);

struct InnovationModel {
    double tau = 0.0;
    Mat3 q = Mat3::Zero();
    Mat3 a = Mat3::Zero();

    static InnovationModel build(const Diffusion &sigma, double tau);
};

/// Counter-based standard-normal stream. Draw i of stream (seed, path_id) is a
/// pure function of (seed, path_id, i), so paths can be generated in any order
/// or on any thread and still replay bit-for-bit.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t path_id, std::uint64_t counter = 0) noexcept
        : seed_(seed), path_id_(path_id), counter_(counter) {}

    [[nodiscard]] double next_normal() noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t path_id() const noexcept { return path_id_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t path_id_;
    std::uint64_t counter_;
};

/// J = A * Z with Z drawn from the stream; advances the stream by 3 draws.
[[nodiscard]] Vec3 sample_innovation(const InnovationModel &model, RngStream &stream) noexcept;

} // namespace clockforge
