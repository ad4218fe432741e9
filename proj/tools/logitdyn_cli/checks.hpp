#pragma once

// The property suite behind `logitdyn verify` and the acceptance runner. Each
// group returns one row per check with a signed margin (>= 0 means pass).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "logitdyn/logitdyn.hpp"

namespace logitdyn::cli {

struct CheckRow {
    int group = 0;
    std::string check;
    std::string params;
    double value = 0.0;
    double limit = 0.0;
    double margin = 0.0;
    bool pass = false;
    bool advisory = false;    // reported, never fails a verify run
    bool diagnostic = false;  // context only, never fails anything
};

struct SuiteOptions {
    std::vector<double> betas{0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    bool log_points = true;  // add ln n and 2 ln n to every per-n grid
    std::size_t exact_n_max = 10;
    std::size_t recursion_n_max = 64;
    double epsilon = 0.25;
    std::uint64_t horizon = 1'000'000'000'000ULL;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    bool corrupt_schedule = false;
};

inline std::vector<double> beta_grid(const SuiteOptions& o, std::size_t n) {
    std::vector<double> g = o.betas;
    if (o.log_points) {
        const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
        g.push_back(ln);
        g.push_back(2.0 * ln);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

/// Exact t_mix memo keyed by (game label, beta), shared by every group.
class TmixCache {
public:
    TmixCache(double eps, std::uint64_t horizon) : eps_(eps), horizon_(horizon) {}

    std::uint64_t get(const GameSpec& game, double beta) {
        const auto key = std::make_pair(label(game), beta);
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }
        const auto p = transition_matrix(game, Beta(beta));
        const auto pi = game.has_potential() ? gibbs_stationary(game, Beta(beta)) : stationary_solve(p);
        MixingOptions opt;
        opt.horizon = horizon_;
        const auto t = mixing_time_exact(p, pi, eps_, opt).t_mix;
        std::lock_guard<std::mutex> lock(mu_);
        memo_.emplace(key, t);
        return t;
    }

    /// Fills the memo for several points at once on the worker pool.
    void prefetch(const std::vector<std::pair<GameSpec, double>>& points, std::size_t workers) {
        parallel_map(points.size(), [&](std::size_t k) { return get(points[k].first, points[k].second); }, workers);
    }

private:
    static std::string label(const GameSpec& g) {
        std::ostringstream os;
        os << g.name() << '/' << g.players();
        if (g.players() == 2 && g.has_potential()) {
            // 2x2 games are told apart by their utility table.
            for (Strategy a : {0, 1})
                for (Strategy b : {0, 1}) os << ',' << g.utility(0, Profile{a, b});
        }
        return os.str();
    }

    double eps_;
    std::uint64_t horizon_;
    std::mutex mu_;
    std::map<std::pair<std::string, double>, std::uint64_t> memo_;
};

class Suite {
public:
    explicit Suite(SuiteOptions o) : opt(std::move(o)), cache(opt.epsilon, opt.horizon) {}

    /// value <= limit passes; margin = limit - value.
    void at_most(int group, std::string check, std::string params, double value, double limit, bool advisory = false) {
        rows.push_back({group, std::move(check), std::move(params), value, limit, limit - value, value <= limit, advisory});
    }
    void at_least(int group, std::string check, std::string params, double value, double limit, bool advisory = false) {
        rows.push_back({group, std::move(check), std::move(params), value, limit, value - limit, value >= limit, advisory});
    }

    /// An O() claim holds on the range when bound/expression never climbs more than
    /// 10x above its value at the smallest size. max/min is logged beside it to show
    /// how tight the expression is.
    void growth(int group, const std::string& check, const std::string& params, const std::vector<double>& r) {
        double hi = 0.0, lo = std::numeric_limits<double>::infinity();
        for (double v : r) {
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        at_most(group, check, params, hi / r.front(), 10.0);
        at_most(group, check + "_spread", params, hi / lo, 10.0);
        rows.back().diagnostic = true;
    }

    SuiteOptions opt;
    TmixCache cache;
    std::vector<CheckRow> rows;
};

namespace detail {

inline std::string kv(std::initializer_list<std::pair<const char*, double>> items) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& [k, v] : items) {
        if (!first) os << ' ';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
}

inline const std::vector<std::array<double, 4>>& coordination_points() {
    static const std::vector<std::array<double, 4>> pts{
        {2, 1, 0, 0}, {3, 2, 0, 0}, {1, 1, 0, 0}, {5, 3, 1, 2}, {1.5, 0.5, 0, 0}};
    return pts;
}

inline double worst_welfare_error(const GameSpec& g, const std::vector<double>& betas,
                                  const std::function<double(double)>& closed) {
    double worst = 0.0;
    for (double b : betas) worst = std::max(worst, rel(expected_social_welfare(g, gibbs_stationary(g, Beta(b))), closed(b)));
    return worst;
}


}  // namespace detail

/// Stationary welfare: closed forms against pi-summation.
inline void check_welfare(Suite& s) {
    const double tol = 1e-10;
    const auto ck = make_ck();
    s.at_most(1, "welfare_ck", "", detail::worst_welfare_error(ck, beta_grid(s.opt, 3), closed_form::ck_welfare), tol);
    s.at_most(1, "welfare_ck_beta0", "beta=0",
              std::abs(expected_social_welfare(ck, gibbs_stationary(ck, Beta(0.0))) + 13.5), 1e-12);
    for (const auto& [a, b, c, d] : detail::coordination_points()) {
        const auto g = make_coordination(a, b, c, d);
        s.at_most(1, "welfare_coordination", detail::kv({{"a", a}, {"b", b}, {"c", c}, {"d", d}}),
                  detail::worst_welfare_error(g, beta_grid(s.opt, 2),
                                              [&](double beta) { return closed_form::coordination_welfare(a, b, c, d, beta); }),
                  tol);
    }
    for (std::size_t n = 2; n <= std::max<std::size_t>(s.opt.exact_n_max, 2); ++n) {
        const double nn = static_cast<double>(n);
        s.at_most(1, "welfare_or", detail::kv({{"n", nn}}),
                  detail::worst_welfare_error(make_or(n), beta_grid(s.opt, n),
                                              [n](double b) { return closed_form::or_welfare(n, b); }),
                  tol);
        s.at_most(1, "welfare_xor", detail::kv({{"n", nn}}),
                  detail::worst_welfare_error(make_xor(n), beta_grid(s.opt, n),
                                              [n](double b) { return closed_form::xor_welfare(n, b); }),
                  tol);
    }
}

/// Matching Pennies: uniform stationary law and d(3) <= 7/16.
inline void check_matching_pennies(Suite& s) {
    const auto g = make_matching_pennies();
    for (double b : beta_grid(s.opt, 2)) {
        const auto p = transition_matrix(g, Beta(b));
        const auto pi = stationary_solve(p);
        s.at_most(2, "mp_uniform_tv", detail::kv({{"beta", b}}), tv_distance(pi, Distribution::uniform(4)), 1e-12);
        s.at_most(2, "mp_d3", detail::kv({{"beta", b}}), d_of_t(p, pi, 3), 7.0 / 16.0);
    }
}

/// Coordination: lambda* closed form and the relaxation sandwich.
inline void check_coordination_spectrum(Suite& s) {
    for (const auto& [a, b, c, d] : detail::coordination_points())
        for (double beta : beta_grid(s.opt, 2)) {
            const auto g = make_coordination(a, b, c, d);
            const auto p = transition_matrix(g, Beta(beta));
            const auto pi = gibbs_stationary(g, Beta(beta));
            const auto sb = relaxation_bounds(p, pi, s.opt.epsilon);
            const std::string at = detail::kv({{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"beta", beta}});
            s.at_most(3, "coordination_lambda", at,
                      std::abs(sb.lambda_star - closed_form::coordination_lambda(a, b, c, d, beta)), 1e-9);
            const auto t = static_cast<double>(s.cache.get(g, beta));
            s.at_most(3, "sandwich_lower", at, sb.lower, t);
            s.at_most(3, "sandwich_upper", at, t, sb.upper);
        }
}

/// OR bottleneck ratios and the bottleneck lower bound against exact t_mix.
inline void check_or_bottleneck(Suite& s) {
    for (std::size_t n = 3; n <= s.opt.exact_n_max; ++n) {
        const auto g = make_or(n);
        for (double b : beta_grid(s.opt, n)) {
            const auto p = transition_matrix(g, Beta(b));
            const auto pi = gibbs_stationary(g, Beta(b));
            const std::vector<std::size_t> zero{0};
            const auto rest = complement(pi.size(), zero);
            const std::string at = detail::kv({{"n", static_cast<double>(n)}, {"beta", b}});
            s.at_most(4, "or_phi_zero", at, std::abs(escape_ratio(p, pi, zero) - closed_form::or_bottleneck_zero(b)), 1e-12);
            s.at_most(4, "or_phi_rest", at, std::abs(escape_ratio(p, pi, rest) - closed_form::or_bottleneck_rest(n, b)),
                      1e-12);
            const auto& set = pi[0] <= 0.5 ? zero : rest;
            s.at_most(4, "or_bottleneck_lower_bound", at, bottleneck_lower_bound(p, pi, set, s.opt.epsilon),
                      static_cast<double>(s.cache.get(g, b)));
        }
    }
}

/// The three weight schedules against the edge inequalities, and the coupling
/// derived expectations against the algebraic left sides.
inline void check_or_path_coupling(Suite& s) {
    const double eps_small = 0.2;
    // One row per schedule and point; the row names the worst level k.
    auto edge_rows = [&](const std::string& name, std::size_t n, double b, const WeightSchedule& w, bool advisory) {
        double worst = -std::numeric_limits<double>::infinity();
        std::size_t at = 0;
        for (const auto& row : check_edge_inequalities(n, b, w).rows) {
            const double excess = row.lhs - row.rhs * (1.0 + kEdgeTolerance);
            if (excess > worst) {
                worst = excess;
                at = row.k;
            }
        }
        s.at_most(5, "edge_" + name,
                  detail::kv({{"n", static_cast<double>(n)}, {"beta", b}, {"k", static_cast<double>(at)}}), worst, 0.0,
                  advisory);
    };
    for (std::size_t n = 3; n <= s.opt.recursion_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            auto large = weights_large_beta(n);
            if (s.opt.corrupt_schedule) large.deltas[1] /= 2.0;
            edge_rows("large_beta", n, b, large, false);
            edge_rows("log_beta", n, b, weights_log_beta(n, b), false);
            if (n >= 8 && b < (1.0 - eps_small) * std::log(static_cast<double>(n)))
                edge_rows("small_beta", n, b, weights_small_beta(n, eps_small), true);
        }
    for (std::size_t n = 3; n <= s.opt.exact_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            for (const auto& w : {weights_large_beta(n), weights_log_beta(n, b), weights_small_beta(n, eps_small)}) {
                double worst = 0.0;
                for (const auto& row : verify_or_contraction(n, b, w).rows)
                    worst = std::max(worst, row.diff / std::max(1.0, w.delta(row.k)));
                s.at_most(5, "contraction_" + w.label, detail::kv({{"n", static_cast<double>(n)}, {"beta", b}}), worst, 1e-10);
            }
        }
}

/// Recursion-table properties behind the log-beta schedule.
inline void check_recursions(Suite& s) {
    auto factorial = [](std::size_t k) {
        double f = 1.0;
        for (std::size_t j = 2; j <= k; ++j) f *= static_cast<double>(j);
        return f;
    };
    for (std::size_t n = 4; n <= s.opt.recursion_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            const auto t = recursion_table(n, b);
            double b_growth = std::numeric_limits<double>::infinity();
            double lr_error = 0.0;
            for (std::size_t k = 2; k <= n - 1; ++k)
                b_growth = std::min(b_growth, t.b[k - 1] / (static_cast<double>(k) * t.b[k - 2]));
            for (std::size_t k = 1; k <= std::min<std::size_t>(n - 1, 20); ++k) {
                lr_error = std::max(lr_error, std::abs(t.l[k - 1] - static_cast<double>(n - k) * factorial(k - 1)));
                lr_error = std::max(lr_error, std::abs(t.r[k - 1] - factorial(k)));
            }
            const auto g = gamma_sequence(n, b);
            const std::string at = detail::kv({{"n", static_cast<double>(n)}, {"beta", b}});
            if (n >= 3 && t.b.size() >= 2) s.at_least(6, "b_k_over_k_b_km1", at, b_growth, 1.0 - 1e-12);
            s.at_most(6, "l_r_closed_forms", at, lr_error, 0.0);
            s.at_most(6, "gamma_below_n", at, *std::max_element(g.begin(), g.end()), static_cast<double>(n) * (1 - 1e-15));
        }
    for (std::size_t n : {16, 32, 64}) {
        if (n > s.opt.recursion_n_max) continue;
        for (std::size_t c : {1, 2}) {
            const auto g = gamma_sequence(n, static_cast<double>(c) * std::log(static_cast<double>(n)));
            double tail = 0.0;
            for (std::size_t k = c + 3; k <= n - 1; ++k) tail = std::max(tail, g[k - 1]);
            const std::string at = detail::kv({{"n", static_cast<double>(n)}, {"c", static_cast<double>(c)}});
            s.at_most(6, "gamma_tail_below_one", at, tail, 1.0 * (1 - 1e-15));
            s.at_most(6, "gamma_c_plus_2", at, g[c + 1], factorial(c + 1) * std::pow(2.0, static_cast<double>(c)));
        }
    }
}

/// XOR: exhaustive lumping, closed-form passage times, exact t_mix window.
inline void check_xor(Suite& s) {
    for (std::size_t n = 1; n <= s.opt.exact_n_max; ++n)
        for (double b : beta_grid(s.opt, n))
            s.at_most(7, "xor_lumping", detail::kv({{"n", static_cast<double>(n)}, {"beta", b}}),
                      verify_xor_coupling_law(n, b).max_error, 1e-12);
    for (std::size_t n = 4; n <= s.opt.recursion_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            const auto h = distance_hitting_times(n, b);
            double worst = 0.0;
            for (std::size_t l = 1; l <= h.nu.size(); ++l) worst = std::max(worst, detail::rel(h.nu[l - 1], nu_closed_form(n, b, l)));
            for (std::size_t l = 1; l <= h.mu.size(); ++l) worst = std::max(worst, detail::rel(h.mu[l - 1], mu_closed_form(n, b, l)));
            s.at_most(7, "xor_passage_closed_forms", detail::kv({{"n", static_cast<double>(n)}, {"beta", b}}), worst, 1e-9);
        }
    for (std::size_t n = 4; n <= s.opt.exact_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            const auto t = static_cast<double>(s.cache.get(make_xor(n), b));
            const std::string at = detail::kv({{"n", static_cast<double>(n)}, {"beta", b}});
            s.at_least(7, "xor_tmix_lower", at, t, (1.0 - 2.0 * s.opt.epsilon) * (1.0 + std::exp(b)) / 2.0);
            s.at_most(7, "xor_tmix_upper", at, t, 4.0 * expected_coalescence_bound(n, b).exact_sum);
        }
}

/// CK: exact three-step coalescence and constant mixing.
inline void check_ck(Suite& s) {
    const auto g = make_ck();
    auto grid = beta_grid(s.opt, 3);
    grid.push_back(50.0);
    for (double b : grid) {
        const auto prob = coalescence_probabilities(coupling_product_matrix(g, Beta(b)), 8, 3);
        s.at_least(8, "ck_three_step_coalescence", detail::kv({{"beta", b}}), *std::min_element(prob.begin(), prob.end()),
                   1.0 / 36.0);
        s.at_most(8, "ck_tmix_constant", detail::kv({{"beta", b}}), static_cast<double>(s.cache.get(g, b)),
                  3.0 * 36.0 * std::log(4.0) + 1.0);
    }
}

/// Finite-size stand-ins for the asymptotic statements: bounds dominate exact
/// t_mix, and bound / expression does not grow by more than 10x over the range.
inline void check_asymptotics(Suite& s) {
    const double eps = s.opt.epsilon;
    // OR, large-beta schedule: O(n^{5/2} 2^n) for every beta.
    {
        std::vector<double> r;
        for (std::size_t n = 3; n <= std::min<std::size_t>(s.opt.recursion_n_max, 20); ++n) {
            const double nn = static_cast<double>(n);
            r.push_back(path_coupling_bound(weights_large_beta(n), eps) / (std::pow(nn, 2.5) * std::pow(2.0, nn)));
        }
        s.growth(9, "or_large_beta_growth", "n=3..20", r);
    }
    // OR, log-beta schedule at beta = c ln n: O(n^{c+3} log n).
    for (std::size_t c : {1, 2}) {
        std::vector<double> r;
        for (std::size_t n = 8; n <= s.opt.recursion_n_max; n *= 2) {
            const double nn = static_cast<double>(n);
            const double b = static_cast<double>(c) * std::log(nn);
            r.push_back(path_coupling_bound(weights_log_beta(n, b), eps) / (std::pow(nn, c + 3.0) * std::log(nn)));
        }
        if (!r.empty()) s.growth(9, "or_log_beta_growth", detail::kv({{"c", static_cast<double>(c)}}), r);
    }
    // OR: every valid schedule's bound dominates exact t_mix.
    for (std::size_t n = 3; n <= s.opt.exact_n_max; ++n)
        for (double b : beta_grid(s.opt, n)) {
            const auto t = static_cast<double>(s.cache.get(make_or(n), b));
            double best = std::numeric_limits<double>::infinity();
            for (const auto& w : {weights_large_beta(n), weights_log_beta(n, b), weights_small_beta(n, 0.2)})
                if (check_edge_inequalities(n, b, w).all_pass()) best = std::min(best, path_coupling_bound(w, eps));
            s.at_most(9, "or_path_bound_dominates", detail::kv({{"n", static_cast<double>(n)}, {"beta", b}}), t, best);
        }
    // OR, small-beta regime O(n log n): exact t_mix / (n ln n) below beta = 0.8 ln n.
    {
        std::vector<double> r;
        for (std::size_t n = 3; n <= s.opt.exact_n_max; ++n) {
            const double nn = static_cast<double>(n);
            double worst = 0.0;
            for (double b : beta_grid(s.opt, n))
                if (b < 0.8 * std::log(nn)) worst = std::max(worst, static_cast<double>(s.cache.get(make_or(n), b)));
            r.push_back(worst / (nn * std::log(nn)));
        }
        if (!r.empty()) s.growth(9, "or_small_beta_growth", "exact t_mix", r);
    }
    // Stairs O(n log n) through the coupling estimate, which must dominate exact t_mix.
    {
        std::vector<double> r;
        for (std::size_t n : {4, 8, 16, 32, 64}) {
            const auto g = make_stairs(n);
            const auto est = coupling_tmix_upper(g, Beta(1.0), s.opt.trials, 10'000'000, eps, s.opt.seed, s.opt.workers);
            if (!est.t_upper) throw horizon_error("stairs coupling estimate timed out", 10'000'000, 1.0);
            const double nn = static_cast<double>(n);
            r.push_back(static_cast<double>(*est.t_upper) / (nn * std::log(nn)));
            if (n <= s.opt.exact_n_max)
                s.at_most(9, "stairs_coupling_dominates", detail::kv({{"n", nn}, {"beta", 1.0}}),
                          static_cast<double>(s.cache.get(g, 1.0)), static_cast<double>(*est.t_upper));
        }
        s.growth(9, "stairs_coupling_growth", "n=4..64", r);
    }
    // XOR O(n^3 e^beta): the Markov-inequality bound dominates, and its ratio stays flat.
    for (double b : s.opt.betas) {
        std::vector<double> r;
        for (std::size_t n = 4; n <= s.opt.recursion_n_max; ++n) {
            const double nn = static_cast<double>(n);
            r.push_back(4.0 * expected_coalescence_bound(n, b).exact_sum / (nn * nn * nn * std::exp(b)));
        }
        s.growth(9, "xor_growth", detail::kv({{"beta", b}}), r);
    }
    for (std::size_t n = 4; n <= s.opt.exact_n_max; ++n)
        for (double b : beta_grid(s.opt, n))
            s.at_most(9, "xor_bound_dominates", detail::kv({{"n", static_cast<double>(n)}, {"beta", b}}),
                      static_cast<double>(s.cache.get(make_xor(n), b)), 4.0 * expected_coalescence_bound(n, b).exact_sum);
    // Coordination Theta(e^{delta beta}): coupling bound dominates; t_mix / e^{delta beta} stays within 10x.
    for (const auto& [a, b, c, d] : detail::coordination_points()) {
        const auto g = make_coordination(a, b, c, d);
        std::vector<double> r;
        for (double beta : beta_grid(s.opt, 2)) {
            const auto t = static_cast<double>(s.cache.get(g, beta));
            r.push_back(t / std::exp((b - c) * beta));
            s.at_most(9, "coordination_coupling_dominates",
                      detail::kv({{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"beta", beta}}), t,
                      closed_form::coordination_coupling_upper(a, b, c, d, beta, eps));
        }
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        s.at_most(9, "coordination_theta", detail::kv({{"a", a}, {"b", b}, {"c", c}, {"d", d}}), *hi / *lo, 10.0);
    }
}

/// Exact t_mix points that several groups share, computed up front on the pool.
inline void prefetch_exact(Suite& s) {
    std::vector<std::pair<GameSpec, double>> pts;
    for (std::size_t n = s.opt.exact_n_max; n >= 3; --n)
        for (double b : beta_grid(s.opt, n)) {
            pts.emplace_back(make_or(n), b);
            if (n >= 4) pts.emplace_back(make_xor(n), b);
        }
    s.cache.prefetch(pts, s.opt.workers);
}

inline constexpr int kGroupCount = 9;

inline void run_group(Suite& s, int group) {
    switch (group) {
        case 1: check_welfare(s); break;
        case 2: check_matching_pennies(s); break;
        case 3: check_coordination_spectrum(s); break;
        case 4: check_or_bottleneck(s); break;
        case 5: check_or_path_coupling(s); break;
        case 6: check_recursions(s); break;
        case 7: check_xor(s); break;
        case 8: check_ck(s); break;
        case 9: check_asymptotics(s); break;
        default: throw invalid_parameters("unknown check group " + std::to_string(group));
    }
}

}  // namespace logitdyn::cli
