#include "clockforge/innovation.hpp"

#include "clockforge/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace clockforge {

Mat3 innovation_covariance(const Diffusion &sigma, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("innovation step must be finite and > 0, got " + std::to_string(tau));
    }
    const double s1 = sigma.sigma1 * sigma.sigma1;
    const double s2 = sigma.sigma2 * sigma.sigma2;
    const double s3 = sigma.sigma3 * sigma.sigma3;
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double t4 = t3 * tau;
    const double t5 = t4 * tau;

    Mat3 q;
    q(0, 0) = s1 * tau + s2 * t3 / 3.0 + s3 * t5 / 20.0;
    q(0, 1) = s2 * t2 / 2.0 + s3 * t4 / 8.0;
    q(0, 2) = s3 * t3 / 6.0;
    q(1, 1) = s2 * tau + s3 * t3 / 3.0;
    q(1, 2) = s3 * t2 / 2.0;
    q(2, 2) = s3 * tau;
    q(1, 0) = q(0, 1);
    q(2, 0) = q(0, 2);
    q(2, 1) = q(1, 2);
    return q;
}

Mat3 cholesky_lower(const Mat3 &q) {
    if (!q.allFinite()) {
        throw ShapeError("covariance contains non-finite entries");
    }
    const double scale = q.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(q(i, j) - q(j, i)) > 1e-12 * scale) {
                throw ShapeError("covariance is not symmetric at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
            }
        }
    }

    // Pivot tolerance is relative to the row's own diagonal. The diagonal of Q
    // spans many orders of magnitude (tau^5 vs tau), so a tolerance tied to the
    // largest diagonal would discard well-conditioned drift columns.
    Mat3 a = Mat3::Zero();
    for (int j = 0; j < 3; ++j) {
        double pivot = q(j, j);
        for (int k = 0; k < j; ++k) {
            pivot -= a(j, k) * a(j, k);
        }
        const double tol = 1e-14 * q(j, j);
        if (pivot < -tol || q(j, j) < 0.0) {
            throw NotPsdError("covariance is not positive semidefinite (pivot " +
                              std::to_string(j) + " = " + std::to_string(pivot) + ")");
        }
        if (pivot <= tol) {
            continue; // degenerate direction: column stays zero
        }
        const double d = std::sqrt(pivot);
        a(j, j) = d;
        for (int i = j + 1; i < 3; ++i) {
            double s = q(i, j);
            for (int k = 0; k < j; ++k) {
                s -= a(i, k) * a(j, k);
            }
            a(i, j) = s / d;
        }
    }
    return a;
}

InnovationModel InnovationModel::build(const Diffusion &sigma, double tau) {
    InnovationModel m;
    m.tau = tau;
    m.q = innovation_covariance(sigma, tau);
    m.a = cholesky_lower(m.q);
    return m;
}

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// (0, 1]: never zero, so log() is safe.
constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

} // namespace

double RngStream::next_normal() noexcept {
    // SplitMix64 sequence keyed by (seed, path_id), indexed by counter.
    const std::uint64_t key = mix64(seed_ ^ mix64(path_id_ * kGamma + 0xD1B54A32D192ED03ULL));
    const std::uint64_t base = key + 2 * counter_ * kGamma;
    const double u1 = to_unit(mix64(base + kGamma));
    const double u2 = to_unit(mix64(base + 2 * kGamma));
    ++counter_;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 sample_innovation(const InnovationModel &model, RngStream &stream) noexcept {
    Vec3 z;
    z[0] = stream.next_normal();
    z[1] = stream.next_normal();
    z[2] = stream.next_normal();
    return model.a * z;
}

} // namespace clockforge
