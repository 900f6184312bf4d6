// Independent reference computations used only by the tests.
//
// The closed-form mean and covariance are checked against the general linear
// SDE solution  X(t) = Phi(t) c + int_0^t Phi(u) mu du + int_0^t Phi(t-s) D dW(s),
// with Phi(u) = [[1, u, u^2/2], [0, 1, u], [0, 0, 1]], evaluated by Gauss-Legendre
// quadrature rather than by the polynomial formulas under test.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>
#include <vector>

namespace oracle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 transition(double u) {
    Mat3 phi;
    phi << 1.0, u, u * u / 2.0, //
        0.0, 1.0, u,            //
        0.0, 0.0, 1.0;
    return phi;
}

// 5-point Gauss-Legendre: exact for polynomials up to degree 9.
template <typename F> auto gauss_legendre(F &&f, double a, double b) {
    static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831,
                                             -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665,
                                             0.4786286704993665, 0.2369268850561891,
                                             0.2369268850561891};
    const double half = (b - a) / 2.0;
    const double mid = (a + b) / 2.0;
    std::decay_t<decltype(f(a))> acc = f(mid + half * x[0]) * w[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        acc += f(mid + half * x[i]) * w[i];
    }
    return (acc * half).eval();
}

inline Mat3 covariance(double s1, double s2, double s3, double t) {
    const Mat3 d = Vec3(s1 * s1, s2 * s2, s3 * s3).asDiagonal();
    return gauss_legendre([&](double u) { return (transition(u) * d * transition(u).transpose()).eval(); },
                          0.0, t);
}

inline Vec3 mean(const Vec3 &c, const Vec3 &mu, double t) {
    return transition(t) * c + gauss_legendre([&](double u) { return (transition(u) * mu).eval(); },
                                              0.0, t);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov statistic of a sample against N(0, 1).
inline double ks_statistic(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

// Asymptotic two-sided KS critical value at alpha = 0.01.
inline double ks_critical_001(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

inline double rel_frobenius(const Mat3 &approx, const Mat3 &exact) {
    return (approx - exact).norm() / exact.norm();
}

} // namespace oracle
