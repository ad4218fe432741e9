#pragma once

// Closed-form stationary quantities of the concrete games. Used as the
// reference side when checking the exact chain computations.

#include <cmath>
#include <cstddef>

namespace logitdyn::closed_form {

/// Expected social welfare of the CK game at stationarity.
inline double ck_welfare(double beta) {
    const double e4 = std::exp(-4.0 * beta);
    const double e6 = std::exp(-6.0 * beta);
    return -(6.0 + 39.0 * e4 + 63.0 * e6) / (1.0 + 3.0 * e4 + 4.0 * e6);
}

/// Social welfare of any CK profile with `ones` players at strategy 1.
inline double ck_level_welfare(std::size_t ones) {
    constexpr double w[] = {-6.0, -13.0, -16.0, -15.0};
    return w[ones];
}

/// Coordination game, Delta = a - d, delta = b - c.
inline double coordination_welfare(double a, double b, double c, double d, double beta) {
    const double big = a - d;
    const double small = b - c;
    const double e1 = std::exp(-(big - small) * beta);
    const double e2 = std::exp(-big * beta);
    return 2.0 * (a + b * e1 + (c + d) * e2) / (1.0 + e1 + 2.0 * e2);
}

/// pi(0,0), pi(1,1) and pi of each off-diagonal profile.
struct CoordinationStationary {
    double both0;
    double both1;
    double mixed;
};

inline CoordinationStationary coordination_stationary(double a, double b, double c, double d, double beta) {
    const double big = a - d;
    const double small = b - c;
    // Scaled by e^{-Delta beta} so that large beta stays finite.
    const double z = 1.0 + std::exp((small - big) * beta) + 2.0 * std::exp(-big * beta);
    return {1.0 / z, std::exp((small - big) * beta) / z, std::exp(-big * beta) / z};
}

/// p = 1/(1+e^{Delta beta}), q = 1/(1+e^{delta beta}).
struct CoordinationRates {
    double p;
    double q;
};

inline CoordinationRates coordination_rates(double a, double b, double c, double d, double beta) {
    return {1.0 / (1.0 + std::exp((a - d) * beta)), 1.0 / (1.0 + std::exp((b - c) * beta))};
}

/// Second largest eigenvalue of the coordination chain.
inline double coordination_lambda(double a, double b, double c, double d, double beta) {
    const auto [p, q] = coordination_rates(a, b, c, d, beta);
    return ((1.0 - p) + (1.0 - q)) / 2.0;
}

/// Coupling-based upper bound on the coordination mixing time, (1/(p+q)) ln(4/eps^2).
inline double coordination_coupling_upper(double a, double b, double c, double d, double beta, double eps) {
    const auto [p, q] = coordination_rates(a, b, c, d, beta);
    return std::log(4.0 / (eps * eps)) / (p + q);
}

inline double or_partition(std::size_t n, double beta) {
    return 1.0 + (std::ldexp(1.0, static_cast<int>(n)) - 1.0) * std::exp(-beta);
}

inline double or_pi_zero(std::size_t n, double beta) { return 1.0 / or_partition(n, beta); }

inline double or_welfare(std::size_t n, double beta) {
    const double m = (std::ldexp(1.0, static_cast<int>(n)) - 1.0) * std::exp(-beta);
    return -static_cast<double>(n) * m / (1.0 + m);
}

inline double or_bottleneck_zero(double beta) { return 1.0 / (1.0 + std::exp(beta)); }

inline double or_bottleneck_rest(std::size_t n, double beta) {
    return 1.0 / ((std::ldexp(1.0, static_cast<int>(n)) - 1.0) * (1.0 + std::exp(-beta)));
}

inline double xor_partition(std::size_t n, double beta) {
    return std::ldexp(1.0, static_cast<int>(n) - 1) * (1.0 + std::exp(-beta));
}

inline double xor_welfare(std::size_t n, double beta) { return -static_cast<double>(n) / (1.0 + std::exp(beta)); }

inline double xor_bottleneck_zero(double beta) { return 1.0 / (1.0 + std::exp(beta)); }

/// Stairs partition function (1+e^beta)^n.
inline double stairs_partition(std::size_t n, double beta) {
    return std::pow(1.0 + std::exp(beta), static_cast<double>(n));
}

/// Matching Pennies off-diagonal rate b = 1/(1+e^{-2 beta}).
inline double matching_pennies_b(double beta) { return 1.0 / (1.0 + std::exp(-2.0 * beta)); }

}  // namespace logitdyn::closed_form
