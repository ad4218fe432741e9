#pragma once

// Under the standard coupling, the Hamming distance between two XOR-game
// chains is itself a Markov chain on {0..n}. This header gives its law, the
// closed-form passage times nu_l (odd 2l-1 -> 2l-2) and mu_l (even 2l -> 2l-2),
// exact hitting times by linear solve, and an exhaustive lumpability check.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logitdyn/coupling.hpp"
#include "logitdyn/error.hpp"
#include "logitdyn/games.hpp"
#include "logitdyn/kernel.hpp"

namespace logitdyn {

struct DistanceStep {
    double down = 0.0;
    double stay = 1.0;
    double up = 0.0;
};

namespace detail {

// 2/(1+e^beta) without overflow.
inline double xor_same_prob(double beta) { return 2.0 / (1.0 + std::exp(beta)); }

}  // namespace detail

inline DistanceStep distance_step_distribution(std::size_t n, double beta, std::size_t d) {
    if (n == 0) throw invalid_parameters("distance chain needs n >= 1");
    (void)Beta(beta);
    if (d > n) throw invalid_parameters("distance " + std::to_string(d) + " exceeds n = " + std::to_string(n));
    DistanceStep s;
    if (d == 0) return s;
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double same = detail::xor_same_prob(beta);
    if (d % 2 == 0) {
        s.down = dd / nn * same;
        s.stay = 1.0 - s.down;
        s.up = 0.0;
    } else {
        s.down = dd / nn;
        s.stay = (nn - dd) / nn * same;
        s.up = (nn - dd) / nn * std::tanh(beta / 2.0);  // 1 - same, without the cancellation
    }
    return s;
}

/// Expected time to go from distance 2l-1 to 2l-2. Needs 1 <= l and 2l-1 <= n.
inline double nu_closed_form(std::size_t n, double beta, std::size_t ell) {
    if (ell == 0 || 2 * ell - 1 > n) throw invalid_parameters("nu: ell out of range");
    const double nn = static_cast<double>(n);
    const double l = static_cast<double>(ell);
    return nn / (2.0 * l - 1.0) * (1.0 + (nn - 2.0 * l + 1.0) / (2.0 * l) * std::expm1(beta) / 2.0);
}

/// Expected time to go from distance 2l to 2l-2. Needs 1 <= l <= n/2.
inline double mu_closed_form(std::size_t n, double beta, std::size_t ell) {
    if (ell == 0 || 2 * ell > n) throw invalid_parameters("mu: ell out of range");
    const double nn = static_cast<double>(n);
    const double l = static_cast<double>(ell);
    return nu_closed_form(n, beta, ell) + nn / (2.0 * l) * (1.0 + std::exp(beta)) / 2.0;
}

/// Expected first-passage times h(d) to distance `target` from every d in [0, n];
/// h(d) = 0 for d <= target.
inline std::vector<double> distance_passage_times(std::size_t n, double beta, std::size_t target) {
    if (target > n) throw invalid_parameters("target distance exceeds n");
    std::vector<double> h(n + 1, 0.0);
    const std::size_t m = n - target;
    if (m == 0) return h;
    // (I - Q) h = 1 with the diagonal written as the leaving rate down + up;
    // 1 - stay would cancel away the small even-level rates at large beta.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    for (std::size_t d = target + 1; d <= n; ++d) {
        const auto row = static_cast<Eigen::Index>(d - target - 1);
        const DistanceStep s = distance_step_distribution(n, beta, d);
        a(row, row) = s.down + (d < n ? s.up : 0.0);
        if (d - 1 > target) a(row, row - 1) -= s.down;
        if (d < n) a(row, row + 1) -= s.up;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw numerical_error("distance passage system is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) throw numerical_error("distance passage solve produced non-finite values");
    for (std::size_t d = target + 1; d <= n; ++d) h[d] = x[static_cast<Eigen::Index>(d - target - 1)];
    return h;
}

struct HittingTimes {
    std::vector<double> nu;  // nu[l - 1], l = 1..ceil(n/2)
    std::vector<double> mu;  // mu[l - 1], l = 1..floor(n/2)
    double worst_start = 0.0;  // max_d E[time to reach 0 from d]
};

inline HittingTimes distance_hitting_times(std::size_t n, double beta) {
    HittingTimes out;
    for (std::size_t ell = 1; 2 * ell - 1 <= n; ++ell) {
        const auto h = distance_passage_times(n, beta, 2 * ell - 2);
        out.nu.push_back(h[2 * ell - 1]);
        if (2 * ell <= n) out.mu.push_back(h[2 * ell]);
    }
    const auto h0 = distance_passage_times(n, beta, 0);
    for (double v : h0) out.worst_start = std::max(out.worst_start, v);
    return out;
}

struct CoalescenceBound {
    double exact_sum = 0.0;  // 1 + sum_{l=1}^{floor(n/2)} mu_l
    double envelope = 0.0;   // (n^2/2)(n(e^beta - 1)/2 + 2) + 1
};

inline CoalescenceBound expected_coalescence_bound(std::size_t n, double beta) {
    if (n == 0) throw invalid_parameters("n must be positive");
    CoalescenceBound b;
    b.exact_sum = 1.0;
    for (std::size_t ell = 1; 2 * ell <= n; ++ell) b.exact_sum += mu_closed_form(n, beta, ell);
    const double nn = static_cast<double>(n);
    b.envelope = nn * nn / 2.0 * (nn * std::expm1(beta) / 2.0 + 2.0) + 1.0;
    return b;
}

struct XorLawReport {
    double max_error = 0.0;
    std::size_t pairs = 0;
    bool pass = false;
};

/// Enumerates every ordered pair (x, y) of XOR profiles, derives the one-step
/// distance law from joint_update and compares it with distance_step_distribution.
inline XorLawReport verify_xor_coupling_law(std::size_t n, double beta, double tol = 1e-12,
                                            std::size_t cap = std::size_t{1} << 10) {
    const GameSpec game = make_xor(n);
    const ProfileSpace space(game, cap);
    const std::size_t size = space.size();
    const Beta b(beta);
    // sigma_i(0 | x) for every profile and player, through the joint-update path.
    std::vector<double> s0(size * n);
    for (std::size_t x = 0; x < size; ++x) {
        const Profile px = space.decode(x);
        for (std::size_t i = 0; i < n; ++i) s0[x * n + i] = joint_update(game, px, px, i, b).both0;
    }
    std::vector<DistanceStep> law(n + 1);
    for (std::size_t d = 0; d <= n; ++d) law[d] = distance_step_distribution(n, beta, d);
    XorLawReport report;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t x = 0; x < size; ++x)
        for (std::size_t y = 0; y < size; ++y) {
            DistanceStep got{0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                const JointUpdate j = detail::joint_from_sigma(s0[x * n + i], s0[y * n + i]);
                const bool differ = ((x ^ y) >> i) & 1U;
                const double agree = j.both0 + j.both1;
                const double disagree = j.x0y1 + j.x1y0;
                if (differ) {
                    got.down += inv_n * agree;
                    got.stay += inv_n * disagree;
                } else {
                    got.stay += inv_n * agree;
                    got.up += inv_n * disagree;
                }
            }
            const auto d = static_cast<std::size_t>(std::popcount(x ^ y));
            const DistanceStep& want = law[d];
            const double err = std::max({std::abs(got.down - want.down), std::abs(got.stay - want.stay),
                                         std::abs(got.up - want.up)});
            report.max_error = std::max(report.max_error, err);
            ++report.pairs;
        }
    report.pass = report.max_error <= tol;
    return report;
}

}  // namespace logitdyn
