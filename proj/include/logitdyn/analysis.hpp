#pragma once

// Total variation, exact mixing times, spectral and bottleneck bounds, and
// stationary expected social welfare.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "logitdyn/error.hpp"
#include "logitdyn/game.hpp"
#include "logitdyn/kernel.hpp"

namespace logitdyn {

inline constexpr double kDefaultEpsilon = 0.25;
inline constexpr std::uint64_t kDefaultHorizon = 10'000'000;

inline double tv_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
    if (mu.size() != nu.size()) throw dimension_error("tv_distance: sizes differ");
    return 0.5 * (mu - nu).lpNorm<1>();
}

inline double tv_distance(const Distribution& mu, const Distribution& nu) {
    return tv_distance(mu.vector(), nu.vector());
}

namespace detail {

// max over rows of the TV distance between row x of `m` and pi.
inline double worst_row_tv(const Eigen::MatrixXd& m, const Eigen::VectorXd& pi) {
    return 0.5 * (m.rowwise() - pi.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
}

inline void check_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw invalid_parameters("epsilon must lie in (0, 1/2)");
}

}  // namespace detail

/// d(t) = max_x || P^t(x, .) - pi ||_TV, by t vector-matrix products per starting state.
inline double d_of_t(const TransitionMatrix& p, const Distribution& pi, std::uint64_t t) {
    if (pi.size() != p.size()) throw dimension_error("d_of_t: distribution and matrix sizes differ");
    const auto size = static_cast<Eigen::Index>(p.size());
    double worst = 0.0;
    Eigen::RowVectorXd row(size);
    for (Eigen::Index x = 0; x < size; ++x) {
        row.setZero();
        row[x] = 1.0;
        for (std::uint64_t s = 0; s < t; ++s) row = row * p.sparse();
        worst = std::max(worst, tv_distance(row.transpose(), pi.vector()));
    }
    return worst;
}

/// d(0), ..., d(t_max) by stepping the full matrix power forward.
inline std::vector<double> distance_curve(const TransitionMatrix& p, const Distribution& pi, std::uint64_t t_max) {
    if (pi.size() != p.size()) throw dimension_error("distance_curve: distribution and matrix sizes differ");
    const auto size = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size, size);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(t_max) + 1);
    out.push_back(detail::worst_row_tv(m, pi.vector()));
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        m = m * p.sparse();
        out.push_back(detail::worst_row_tv(m, pi.vector()));
    }
    return out;
}

struct MixingReport {
    double epsilon = kDefaultEpsilon;
    std::uint64_t t_mix = 0;
    /// Every evaluated (t, d(t)), sorted by t. Always contains t_mix and t_mix - 1.
    std::vector<std::pair<std::uint64_t, double>> d_curve;

    std::optional<double> d_at(std::uint64_t t) const {
        auto it = std::lower_bound(d_curve.begin(), d_curve.end(), std::make_pair(t, -1.0));
        if (it == d_curve.end() || it->first != t) return std::nullopt;
        return it->second;
    }
};

struct MixingOptions {
    std::uint64_t horizon = kDefaultHorizon;
    /// Linear stepping stops after this many steps or this many flops, whichever first.
    std::uint64_t linear_steps = 4096;
    double linear_flops = 2e8;
};

/// Smallest t with d(t) <= eps. Early times are stepped one at a time; beyond that
/// the search squares the matrix until d drops below eps and then descends the
/// binary expansion of the answer, so the cost is O(log t_mix) dense products.
inline MixingReport mixing_time_exact(const TransitionMatrix& p, const Distribution& pi, double eps = kDefaultEpsilon,
                                      const MixingOptions& opt = {}) {
    detail::check_epsilon(eps);
    if (pi.size() != p.size()) throw dimension_error("mixing_time_exact: distribution and matrix sizes differ");
    const auto size = static_cast<Eigen::Index>(p.size());
    const Eigen::VectorXd& pv = pi.vector();
    std::map<std::uint64_t, double> curve;
    MixingReport report;
    report.epsilon = eps;
    auto finish = [&](std::uint64_t t) {
        report.t_mix = t;
        report.d_curve.assign(curve.begin(), curve.end());
        return report;
    };

    const double flops_per_step = static_cast<double>(size) * static_cast<double>(p.sparse().nonZeros());
    std::uint64_t linear = std::max<std::uint64_t>(16, static_cast<std::uint64_t>(opt.linear_flops / flops_per_step));
    linear = std::min({linear, opt.linear_steps, opt.horizon});

    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size, size);
    double d = detail::worst_row_tv(m, pv);
    curve[0] = d;
    if (d <= eps) return finish(0);
    std::uint64_t t = 0;
    while (t < linear) {
        m = m * p.sparse();
        ++t;
        d = detail::worst_row_tv(m, pv);
        curve[t] = d;
        if (d <= eps) return finish(t);
    }
    if (t >= opt.horizon)
        throw horizon_error("mixing time exceeds horizon " + std::to_string(opt.horizon), t, d);

    // powers[j] = P^(2^j); grow until d(2^K) <= eps.
    std::vector<Eigen::MatrixXd> powers;
    powers.emplace_back(p.dense());
    std::uint64_t span = 1;
    while (true) {
        const double dk = detail::worst_row_tv(powers.back(), pv);
        curve.emplace(span, dk);
        if (dk <= eps) break;
        if (span >= opt.horizon)
            throw horizon_error("mixing time exceeds horizon " + std::to_string(opt.horizon), span, dk);
        Eigen::MatrixXd next = powers.back() * powers.back();
        powers.push_back(std::move(next));
        span *= 2;
    }
    // d(t) > eps and d(t + 2^K) <= eps; descend the bits of the gap.
    for (std::size_t j = powers.size() - 1; j-- > 0;) {
        Eigen::MatrixXd candidate = m * powers[j];
        const std::uint64_t tc = t + (std::uint64_t{1} << j);
        const double dc = detail::worst_row_tv(candidate, pv);
        curve[tc] = dc;
        if (dc > eps) {
            m = std::move(candidate);
            t = tc;
        }
    }
    // Confirm the answer with one more exact step.
    Eigen::MatrixXd last = m * p.sparse();
    const double dl = detail::worst_row_tv(last, pv);
    curve[t + 1] = dl;
    if (dl > eps) throw numerical_error("mixing_time_exact: d(t) not monotone at t = " + std::to_string(t + 1));
    if (t + 1 > opt.horizon)
        throw horizon_error("mixing time exceeds horizon " + std::to_string(opt.horizon), t + 1, dl);
    return finish(t + 1);
}

inline double expected_social_welfare(const GameSpec& game, const Distribution& pi,
                                      std::size_t cap = kDefaultEnumerationCap) {
    const ProfileSpace space(game, cap);
    if (space.size() != pi.size()) throw dimension_error("distribution size does not match the profile space");
    double total = 0.0;
    for (std::size_t k = 0; k < space.size(); ++k) {
        if (pi[k] == 0.0) continue;
        const Profile x = space.decode(k);
        double w = 0.0;
        for (std::size_t i = 0; i < game.players(); ++i) w += game.utility(i, x);
        total += w * pi[k];
    }
    return total;
}

struct SpectralBounds {
    double lambda_star = 0.0;
    double t_rel = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    double pi_min = 0.0;
};

/// Absolute spectral gap data of a reversible chain from the symmetrized kernel
/// D^{1/2} P D^{-1/2}, with the relaxation-time sandwich for t_mix(eps).
inline SpectralBounds relaxation_bounds(const TransitionMatrix& p, const Distribution& pi, double eps = kDefaultEpsilon,
                                        double reversibility_tol = 1e-12) {
    detail::check_epsilon(eps);
    if (pi.size() != p.size()) throw dimension_error("relaxation_bounds: distribution and matrix sizes differ");
    const double violation = detailed_balance_violation(p, pi);
    if (!(violation < reversibility_tol))
        throw reversibility_error("chain is not reversible w.r.t. pi (violation " + std::to_string(violation) + ")");
    SpectralBounds out;
    out.pi_min = pi.min();
    if (p.size() == 1) {
        out.lower = out.upper = 0.0;
        return out;
    }
    const Eigen::VectorXd root = pi.vector().cwiseSqrt();
    const Eigen::VectorXd inv_root = root.cwiseInverse();
    Eigen::MatrixXd s = root.asDiagonal() * p.dense() * inv_root.asDiagonal();
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw numerical_error("symmetric eigensolve failed");
    const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending; ev[last] is the eigenvalue 1
    const Eigen::Index top = ev.size() - 1;
    out.lambda_star = std::max(std::abs(ev[0]), std::abs(ev[top - 1]));
    if (top == 1) out.lambda_star = std::abs(ev[0]);
    if (!(out.lambda_star < 1.0)) throw numerical_error("lambda* >= 1: chain is not ergodic to working precision");
    out.t_rel = 1.0 / (1.0 - out.lambda_star);
    out.lower = (out.t_rel - 1.0) * std::log(1.0 / (2.0 * eps));
    out.upper = out.t_rel * std::log(1.0 / (eps * out.pi_min));
    return out;
}

/// Q(S, S^c) / pi(S) without the pi(S) <= 1/2 admissibility check.
inline double escape_ratio(const TransitionMatrix& p, const Distribution& pi, const std::vector<std::size_t>& set) {
    if (pi.size() != p.size()) throw dimension_error("distribution and matrix sizes differ");
    if (set.empty()) throw invalid_set("state set is empty");
    std::vector<char> in(p.size(), 0);
    for (std::size_t x : set) {
        if (x >= p.size()) throw invalid_set("state index out of range");
        in[x] = 1;
    }
    double mass = 0.0;
    double flow = 0.0;
    const auto& m = p.sparse();
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (!in[x]) continue;
        mass += pi[x];
        for (SparseRowMatrix::InnerIterator it(m, static_cast<Eigen::Index>(x)); it; ++it)
            if (!in[static_cast<std::size_t>(it.col())]) flow += pi[x] * it.value();
    }
    if (!(mass > 0.0)) throw invalid_set("state set has zero stationary mass");
    return flow / mass;
}

/// Bottleneck ratio Phi(S). Requires pi(S) <= 1/2.
inline double bottleneck_ratio(const TransitionMatrix& p, const Distribution& pi, const std::vector<std::size_t>& set) {
    double mass = 0.0;
    std::vector<char> seen(p.size(), 0);
    for (std::size_t x : set) {
        if (x >= p.size()) throw invalid_set("state index out of range");
        if (!seen[x]) mass += pi[x];
        seen[x] = 1;
    }
    if (mass > 0.5 + 1e-15) throw invalid_set("pi(S) = " + std::to_string(mass) + " exceeds 1/2");
    return escape_ratio(p, pi, set);
}

/// (1 - 2 eps) / (2 Phi(S)).
inline double bottleneck_lower_bound(const TransitionMatrix& p, const Distribution& pi,
                                     const std::vector<std::size_t>& set, double eps = kDefaultEpsilon) {
    detail::check_epsilon(eps);
    return (1.0 - 2.0 * eps) / (2.0 * bottleneck_ratio(p, pi, set));
}

/// All states except those listed.
inline std::vector<std::size_t> complement(std::size_t size, const std::vector<std::size_t>& set) {
    std::vector<char> in(size, 0);
    for (std::size_t x : set) in.at(x) = 1;
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < size; ++x)
        if (!in[x]) out.push_back(x);
    return out;
}

}  // namespace logitdyn
