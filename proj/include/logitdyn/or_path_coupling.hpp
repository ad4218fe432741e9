#pragma once

// Weighted path coupling for the OR game. An edge of the Hamming graph joining
// a profile with k - 1 ones to one with k ones gets weight delta_k; the three
// schedules below choose delta_1..delta_n and a contraction rate alpha.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "logitdyn/coupling.hpp"
#include "logitdyn/error.hpp"
#include "logitdyn/games.hpp"
#include "logitdyn/kernel.hpp"

namespace logitdyn {

struct WeightSchedule {
    std::vector<double> deltas;  // deltas[k - 1] = delta_k
    double alpha = 0.0;
    std::string label;

    std::size_t n() const noexcept { return deltas.size(); }
    double delta(std::size_t k) const { return deltas.at(k - 1); }
    double delta_max() const { return *std::max_element(deltas.begin(), deltas.end()); }
    /// Weighted length of the monotone path from all-0 to all-1: sum of delta_k.
    double diameter() const {
        double s = 0.0;
        for (double d : deltas) s += d;
        return s;
    }
    bool valid() const {
        return alpha > 0.0 && std::all_of(deltas.begin(), deltas.end(), [](double d) { return d >= 1.0; });
    }
};

namespace detail {

inline void require_or_size(std::size_t n) {
    if (n < 3) throw invalid_parameters("OR path coupling needs n >= 3, got " + std::to_string(n));
}

}  // namespace detail

/// delta_n = 1, delta_k = ((n-k)/k) delta_{k+1} + 1, delta_1 = ((n-1) delta_2 + 1)/2,
/// alpha = 1/(2 n delta_max). Valid for every beta.
inline WeightSchedule weights_large_beta(std::size_t n) {
    detail::require_or_size(n);
    WeightSchedule s{std::vector<double>(n, 1.0), 0.0, "large_beta"};
    for (std::size_t k = n - 1; k >= 2; --k)
        s.deltas[k - 1] = static_cast<double>(n - k) / static_cast<double>(k) * s.deltas[k] + 1.0;
    s.deltas[0] = (static_cast<double>(n - 1) * s.deltas[1] + 1.0) / 2.0;
    s.alpha = 1.0 / (2.0 * static_cast<double>(n) * s.delta_max());
    return s;
}

/// delta_1 = n^{1-eps}, delta_2 = 4/3, the rest 1, alpha = 1/n.
inline WeightSchedule weights_small_beta(std::size_t n, double eps) {
    detail::require_or_size(n);
    if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameters("small-beta schedule needs 0 < eps < 1");
    WeightSchedule s{std::vector<double>(n, 1.0), 1.0 / static_cast<double>(n), "small_beta"};
    s.deltas[0] = std::pow(static_cast<double>(n), 1.0 - eps);
    s.deltas[1] = 4.0 / 3.0;
    return s;
}

/// Recursions behind the log-beta schedule. Entry [k - 1] holds index k, k = 1..n-1.
struct RecursionTable {
    std::size_t n = 0;
    double beta = 0.0;
    std::vector<double> a, b;        // a_1 = n-1, b_1 = n e^{-beta} + 1
    std::vector<double> p, q, l, r;  // a_k = p_k e^{-beta} + l_k, b_k = q_k e^{-beta} + r_k
};

inline RecursionTable recursion_table(std::size_t n, double beta) {
    detail::require_or_size(n);
    (void)Beta(beta);
    const double e = std::exp(-beta);
    const double nn = static_cast<double>(n);
    const std::size_t m = n - 1;
    RecursionTable t;
    t.n = n;
    t.beta = beta;
    t.a.resize(m);
    t.b.resize(m);
    t.p.resize(m);
    t.q.resize(m);
    t.l.resize(m);
    t.r.resize(m);
    t.a[0] = nn - 1.0;
    t.b[0] = nn * e + 1.0;
    t.p[0] = 0.0;
    t.q[0] = nn;
    // l and r are integers; carry them exactly while they fit.
    __int128 li = static_cast<__int128>(n) - 1;
    __int128 ri = 1;
    bool exact = true;
    t.l[0] = static_cast<double>(li);
    t.r[0] = static_cast<double>(ri);
    for (std::size_t k = 2; k <= m; ++k) {
        const double kk = static_cast<double>(k);
        t.a[k - 1] = (nn - kk) * t.b[k - 2];
        t.b[k - 1] = (nn + 1.0) * t.b[k - 2] - (kk - 1.0) * t.a[k - 2];
        t.p[k - 1] = (nn - kk) * t.q[k - 2];
        t.q[k - 1] = (nn + 1.0) * t.q[k - 2] - (kk - 1.0) * t.p[k - 2];
        if (exact && k <= 30) {
            const __int128 lk = static_cast<__int128>(n - k) * ri;
            const __int128 rk = static_cast<__int128>(n + 1) * ri - static_cast<__int128>(k - 1) * li;
            li = lk;
            ri = rk;
            t.l[k - 1] = static_cast<double>(li);
            t.r[k - 1] = static_cast<double>(ri);
        } else {
            exact = false;
            t.l[k - 1] = (nn - kk) * t.r[k - 2];
            t.r[k - 1] = (nn + 1.0) * t.r[k - 2] - (kk - 1.0) * t.l[k - 2];
        }
    }
    return t;
}

/// gamma_k = (p_k e^{-beta} + l_k) / (q_k e^{-beta} + r_k), k = 1..n-1.
inline std::vector<double> gamma_sequence(std::size_t n, double beta) {
    const RecursionTable t = recursion_table(n, beta);
    const double e = std::exp(-beta);
    std::vector<double> g(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) g[k] = (t.p[k] * e + t.l[k]) / (t.q[k] * e + t.r[k]);
    return g;
}

/// The beta -> infinity limit of gamma_k: (n-k)/k.
inline std::vector<double> large_beta_gammas(std::size_t n) {
    detail::require_or_size(n);
    std::vector<double> g(n - 1);
    for (std::size_t k = 1; k < n; ++k) g[k - 1] = static_cast<double>(n - k) / static_cast<double>(k);
    return g;
}

/// delta_n = 1, delta_k = gamma_k delta_{k+1} + 1 for 2 <= k <= n-1,
/// delta_1 = ((1+e^{-beta})/2)(gamma_1 delta_2 + 1), alpha = 1/(2 n delta_max).
inline WeightSchedule weights_log_beta(std::size_t n, double beta) {
    const std::vector<double> g = gamma_sequence(n, beta);
    WeightSchedule s{std::vector<double>(n, 1.0), 0.0, "log_beta"};
    for (std::size_t k = n - 1; k >= 2; --k) s.deltas[k - 1] = g[k - 1] * s.deltas[k] + 1.0;
    s.deltas[0] = (1.0 + std::exp(-beta)) / 2.0 * (g[0] * s.deltas[1] + 1.0);
    s.alpha = 1.0 / (2.0 * static_cast<double>(n) * s.delta_max());
    return s;
}

/// n * max over 1 <= h <= j <= n-1 of prod_{i=h..j} gamma_i, with n = gammas.size() + 1.
/// The empty product counts, so the bound never drops below n.
inline double delta_max_bound(const std::vector<double>& gammas) {
    if (gammas.empty()) throw invalid_parameters("delta_max_bound needs at least one gamma");
    double best = 1.0;
    for (std::size_t h = 0; h < gammas.size(); ++h) {
        double prod = 1.0;
        for (std::size_t j = h; j < gammas.size(); ++j) {
            prod *= gammas[j];
            best = std::max(best, prod);
        }
    }
    return static_cast<double>(gammas.size() + 1) * best;
}

/// delta_k = 1 + sum_{j=k}^{n-1} prod_{i=k}^{j} gamma_i, delta_n = 1.
inline std::vector<double> delta_from_gammas(const std::vector<double>& gammas) {
    const std::size_t n = gammas.size() + 1;
    std::vector<double> d(n, 1.0);
    for (std::size_t k = 1; k < n; ++k) {
        double sum = 1.0;
        double prod = 1.0;
        for (std::size_t j = k; j < n; ++j) {
            prod *= gammas[j - 1];
            sum += prod;
        }
        d[k - 1] = sum;
    }
    return d;
}

struct EdgeCheck {
    std::size_t k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool pass = false;
};

struct EdgeReport {
    std::vector<EdgeCheck> rows;
    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const EdgeCheck& c) { return c.pass; });
    }
    /// First failing level, or 0.
    std::size_t first_failure() const {
        for (const auto& c : rows)
            if (!c.pass) return c.k;
        return 0;
    }
};

/// Relative tolerance on lhs <= rhs; absorbs rounding only.
inline constexpr double kEdgeTolerance = 1e-12;

/// Left side of the level-k contraction inequality: the expected weighted distance
/// after one coupled step from an edge at level k.
inline double edge_lhs(std::size_t n, double beta, const WeightSchedule& s, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double f = 1.0 / (1.0 + std::exp(-beta));
    auto d = [&](std::size_t j) { return s.delta(j); };
    if (k == 1) return (nn - 1.0) / nn * (d(1) * f + d(2) / 2.0);
    if (k == 2) return (2.0 * f * d(1) + (nn - 1.0) * d(2) + (nn - 2.0) * d(3)) / (2.0 * nn);
    if (k < n)
        return ((nn - 1.0) * d(k) + static_cast<double>(k - 1) * d(k - 1) + static_cast<double>(n - k) * d(k + 1)) /
               (2.0 * nn);
    return (nn - 1.0) / (2.0 * nn) * (d(n) + d(n - 1));
}

inline EdgeReport check_edge_inequalities(std::size_t n, double beta, const WeightSchedule& s) {
    detail::require_or_size(n);
    if (s.n() != n)
        throw dimension_error("schedule has " + std::to_string(s.n()) + " weights, expected " + std::to_string(n));
    EdgeReport report;
    for (std::size_t k = 1; k <= n; ++k) {
        EdgeCheck c;
        c.k = k;
        c.lhs = edge_lhs(n, beta, s, k);
        c.rhs = s.delta(k) * std::exp(-s.alpha);
        c.slack = c.rhs - c.lhs;
        c.pass = c.slack >= -kEdgeTolerance * std::abs(c.rhs);
        report.rows.push_back(c);
    }
    return report;
}

/// (ln diameter + ln(1/eps)) / alpha.
inline double path_coupling_bound(double diameter, double alpha, double eps) {
    if (!(diameter >= 1.0) || !(alpha > 0.0) || !(eps > 0.0 && eps < 1.0))
        throw invalid_parameters("path_coupling_bound needs diameter >= 1, alpha > 0, 0 < eps < 1");
    return (std::log(diameter) + std::log(1.0 / eps)) / alpha;
}

inline double path_coupling_bound(const WeightSchedule& s, double eps) {
    return path_coupling_bound(s.diameter(), s.alpha, eps);
}

/// Shortest-path distance between u and v in the OR Hamming graph with level
/// weights. Players are grouped by (u_i, v_i); by symmetry the search runs on
/// the counts of ones in each group, which identifies v uniquely at the end.
inline double or_path_distance(const WeightSchedule& s, const Profile& u, const Profile& v) {
    const std::size_t n = s.n();
    if (u.size() != n || v.size() != n) throw dimension_error("profile length does not match the schedule");
    if (u == v) return 0.0;
    std::array<std::size_t, 4> size{};  // groups 00, 01, 10, 11 by (u_i, v_i)
    for (std::size_t i = 0; i < n; ++i) ++size[2 * u[i] + v[i]];
    std::array<std::size_t, 4> dim{};
    for (int g = 0; g < 4; ++g) dim[g] = size[g] + 1;
    auto index = [&](const std::array<std::size_t, 4>& c) {
        return ((c[0] * dim[1] + c[1]) * dim[2] + c[2]) * dim[3] + c[3];
    };
    const std::array<std::size_t, 4> start{0, 0, size[2], size[3]};
    const std::array<std::size_t, 4> goal{0, size[1], 0, size[3]};
    std::vector<double> dist(dim[0] * dim[1] * dim[2] * dim[3], std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::array<std::size_t, 4>>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[index(start)] = 0.0;
    heap.push({0.0, start});
    while (!heap.empty()) {
        auto [d, c] = heap.top();
        heap.pop();
        if (d > dist[index(c)]) continue;
        if (c == goal) return d;
        const std::size_t level = c[0] + c[1] + c[2] + c[3];
        for (int g = 0; g < 4; ++g) {
            for (int dir : {-1, +1}) {
                if (dir < 0 && c[g] == 0) continue;
                if (dir > 0 && c[g] == size[g]) continue;
                auto nc = c;
                nc[g] = dir > 0 ? c[g] + 1 : c[g] - 1;
                const double w = s.delta(dir > 0 ? level + 1 : level);
                const double nd = d + w;
                if (nd < dist[index(nc)]) {
                    dist[index(nc)] = nd;
                    heap.push({nd, nc});
                }
            }
        }
    }
    throw numerical_error("or_path_distance: goal unreachable");
}

struct ContractionCheck {
    std::size_t k = 0;
    double coupled = 0.0;  // E[rho(X_1, Y_1)] from the coupling
    double lhs = 0.0;      // algebraic left side
    double diff = 0.0;
    bool pass = false;
};

struct ContractionReport {
    std::vector<ContractionCheck> rows;
    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const ContractionCheck& c) { return c.pass; });
    }
};

/// For each level k, builds the edge x (k-1 ones on players 0..k-2) and y = x with
/// player n-1 set, computes E[rho(X_1, Y_1)] from joint_update, and compares it
/// with edge_lhs. Tolerance is 1e-10 relative to the edge weight.
inline ContractionReport verify_or_contraction(std::size_t n, double beta, const WeightSchedule& s,
                                               double tol = 1e-10) {
    detail::require_or_size(n);
    if (s.n() != n) throw dimension_error("schedule length does not match n");
    const GameSpec game = make_or(n);
    const Beta b(beta);
    ContractionReport report;
    for (std::size_t k = 1; k <= n; ++k) {
        Profile x = Profile::zeros(n);
        for (std::size_t i = 0; i + 1 < k; ++i) x[i] = 1;
        Profile y = x.with(n - 1, 1);
        double expected = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const JointUpdate j = joint_update(game, x, y, i, b);
            const double w[4] = {j.both0, j.both1, j.x0y1, j.x1y0};
            const Strategy sx[4] = {0, 1, 0, 1};
            const Strategy sy[4] = {0, 1, 1, 0};
            for (int c = 0; c < 4; ++c) {
                if (w[c] <= 0.0) continue;
                expected += w[c] * or_path_distance(s, x.with(i, sx[c]), y.with(i, sy[c]));
            }
        }
        expected /= static_cast<double>(n);
        ContractionCheck c;
        c.k = k;
        c.coupled = expected;
        c.lhs = edge_lhs(n, beta, s, k);
        c.diff = std::abs(c.coupled - c.lhs);
        c.pass = c.diff <= tol * std::max(1.0, s.delta(k));
        report.rows.push_back(c);
    }
    return report;
}

}  // namespace logitdyn
