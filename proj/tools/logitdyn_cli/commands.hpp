#pragma once

// analyze | verify | simulate | sweep. Each command computes its grid points on
// the worker pool and writes rows from one thread in grid order.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "logitdyn/logitdyn.hpp"
#include "logitdyn_cli/checks.hpp"
#include "logitdyn_cli/config.hpp"
#include "logitdyn_cli/csv.hpp"

namespace logitdyn::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kVerifyFailed = 2, kExhausted = 3 };

struct Quantity {
    std::string name;
    double value = 0.0;
    std::string status = "ok";  // ok | skipped(cap) | skipped(horizon) | n/a
};

namespace detail {

inline std::size_t state_count(const ExperimentConfig& c) {
    const std::size_t n = players(c.game);
    if (n >= 63) return std::numeric_limits<std::size_t>::max();
    return std::size_t{1} << n;
}

// Lowest-probability states, greedily, while their mass stays <= 1/2.
inline std::vector<std::size_t> light_set(const Distribution& pi) {
    std::vector<std::size_t> order(pi.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pi[a] < pi[b]; });
    std::vector<std::size_t> out;
    double mass = 0.0;
    for (std::size_t x : order) {
        if (mass + pi[x] > 0.5) break;
        mass += pi[x];
        out.push_back(x);
    }
    if (out.empty()) out.push_back(order.front());
    return out;
}

inline std::optional<double> closed_welfare(const GameConfig& g, double beta) {
    if (g.name == "ck") return closed_form::ck_welfare(beta);
    if (g.name == "coordination") return closed_form::coordination_welfare(g.a, g.b, g.c, g.d, beta);
    if (g.name == "or") return closed_form::or_welfare(g.n, beta);
    if (g.name == "xor") return closed_form::xor_welfare(g.n, beta);
    return std::nullopt;
}

}  // namespace detail

/// Every per-beta quantity that analyze and sweep report. `curve` receives d(t)
/// for the d-curve file when t_mix was computed.
inline std::vector<Quantity> analyze_point(const ExperimentConfig& c, const GameSpec& game, double beta,
                                           std::vector<double>* curve = nullptr) {
    std::vector<Quantity> q;
    const Beta b(beta);
    const std::size_t states = detail::state_count(c);
    const auto skip = [&](const std::string& name, const std::string& why) { q.push_back({name, 0.0, why}); };
    q.push_back({"states", static_cast<double>(states)});

    // Stationary law: Gibbs when a potential exists, otherwise a solve on the kernel.
    std::optional<Distribution> pi;
    if (game.has_potential() && states <= kDefaultEnumerationCap)
        pi = gibbs_stationary(game, b);
    else if (states <= c.state_cap)
        pi = stationary_solve(transition_matrix(game, b, c.state_cap));
    if (pi) {
        const double tv = tv_distance(*pi, Distribution::uniform(pi->size()));
        q.push_back({"pi_min", pi->min()});
        q.push_back({"pi_max", pi->vector().maxCoeff()});
        q.push_back({"tv_from_uniform", tv});
        q.push_back({"stationary_uniform", tv < 1e-12 ? 1.0 : 0.0});
        q.push_back({"EW_exact", expected_social_welfare(game, *pi)});
    } else {
        for (const char* name : {"pi_min", "pi_max", "tv_from_uniform", "stationary_uniform", "EW_exact"})
            skip(name, "skipped(cap)");
    }
    if (const auto w = detail::closed_welfare(c.game, beta))
        q.push_back({"EW_closed", *w});
    else
        skip("EW_closed", "n/a");

    // Exact mixing, spectral and bottleneck data need the kernel in memory.
    if (states <= c.state_cap && pi) {
        const auto p = transition_matrix(game, b, c.state_cap);
        MixingOptions opt;
        opt.horizon = c.horizon;
        std::optional<std::uint64_t> t;
        try {
            t = mixing_time_exact(p, *pi, c.epsilon, opt).t_mix;
            q.push_back({"t_mix", static_cast<double>(*t)});
        } catch (const horizon_error& e) {
            q.push_back({"t_mix", static_cast<double>(e.last_t()), "skipped(horizon)"});
        }
        if (curve && t) *curve = distance_curve(p, *pi, std::min<std::uint64_t>(2 * *t + 2, 512));
        if (game.has_potential()) {
            const auto sb = relaxation_bounds(p, *pi, c.epsilon);
            q.push_back({"lambda_star", sb.lambda_star});
            q.push_back({"t_rel", sb.t_rel});
            q.push_back({"sandwich_lower", sb.lower});
            q.push_back({"sandwich_upper", sb.upper});
        } else {
            for (const char* name : {"lambda_star", "t_rel", "sandwich_lower", "sandwich_upper"}) skip(name, "n/a");
        }
        const bool hamming_zero = c.game.name == "or" || c.game.name == "xor";
        const auto set = hamming_zero && (*pi)[0] <= 0.5 ? std::vector<std::size_t>{0} : detail::light_set(*pi);
        q.push_back({"bottleneck_set_size", static_cast<double>(set.size())});
        q.push_back({"bottleneck_ratio", bottleneck_ratio(p, *pi, set)});
        q.push_back({"bottleneck_lower", bottleneck_lower_bound(p, *pi, set, c.epsilon)});
    } else {
        for (const char* name : {"t_mix", "lambda_star", "t_rel", "sandwich_lower", "sandwich_upper",
                                 "bottleneck_set_size", "bottleneck_ratio", "bottleneck_lower"})
            skip(name, "skipped(cap)");
    }

    // Game-specific bounds.
    if (c.game.name == "coordination") {
        q.push_back({"lambda_closed", closed_form::coordination_lambda(c.game.a, c.game.b, c.game.c, c.game.d, beta)});
        q.push_back({"coupling_upper",
                     closed_form::coordination_coupling_upper(c.game.a, c.game.b, c.game.c, c.game.d, beta, c.epsilon)});
    } else if (c.game.name == "or" && c.game.n >= 3) {
        const std::size_t n = c.game.n;
        q.push_back({"phi_zero_closed", closed_form::or_bottleneck_zero(beta)});
        q.push_back({"phi_rest_closed", closed_form::or_bottleneck_rest(n, beta)});
        const auto schedules = {weights_large_beta(n), weights_log_beta(n, beta), weights_small_beta(n, 0.2)};
        for (const auto& w : schedules) {
            if (check_edge_inequalities(n, beta, w).all_pass())
                q.push_back({"path_bound_" + w.label, path_coupling_bound(w, c.epsilon)});
            else
                skip("path_bound_" + w.label, "n/a");
        }
    } else if (c.game.name == "xor") {
        const auto bound = expected_coalescence_bound(c.game.n, beta);
        q.push_back({"coalescence_sum", bound.exact_sum});
        q.push_back({"tmix_upper_markov", 4.0 * bound.exact_sum});
        q.push_back({"tmix_lower", (1.0 - 2.0 * c.epsilon) * (1.0 + std::exp(beta)) / 2.0});
    } else if (c.game.name == "matching_pennies") {
        q.push_back({"d3", states <= c.state_cap && pi ? d_of_t(transition_matrix(game, b), *pi, 3) : 0.0});
    }
    return q;
}

inline int run_analyze(const ExperimentConfig& c) {
    validate(c);
    const auto game = make_game(c.game);
    std::filesystem::create_directories(c.out_dir);
    std::vector<std::vector<double>> curves(c.beta_grid.size());
    const auto points = parallel_map(
        c.beta_grid.size(), [&](std::size_t k) { return analyze_point(c, game, c.beta_grid[k], &curves[k]); },
        c.workers);
    CsvWriter out(std::filesystem::path(c.out_dir) / "analyze.csv", c, {"beta", "quantity", "value", "status"});
    for (std::size_t k = 0; k < points.size(); ++k)
        for (const auto& q : points[k])
            out.row({num(c.beta_grid[k]), q.name, q.status == "ok" || q.status == "skipped(horizon)" ? num(q.value) : "",
                     q.status});
    CsvWriter dc(std::filesystem::path(c.out_dir) / "dcurve.csv", c, {"beta", "t", "d"});
    for (std::size_t k = 0; k < curves.size(); ++k)
        for (std::size_t t = 0; t < curves[k].size(); ++t)
            dc.row({num(c.beta_grid[k]), num(static_cast<std::uint64_t>(t)), num(curves[k][t])});
    return kOk;
}

inline SuiteOptions suite_options(const ExperimentConfig& c, bool corrupt) {
    SuiteOptions o;
    o.betas = c.beta_grid;
    o.exact_n_max = c.verify_n_max;
    o.recursion_n_max = c.verify_rec_n_max;
    o.epsilon = c.epsilon;
    o.horizon = c.horizon;
    o.trials = c.trials;
    o.seed = c.seed;
    o.workers = c.workers;
    o.corrupt_schedule = corrupt;
    return o;
}

/// Runs every check group and writes verify.csv. Advisory rows are reported but
/// never fail the run.
inline int run_verify(const ExperimentConfig& c, bool corrupt_schedule = false, std::ostream& log = std::cerr) {
    validate(c);
    std::filesystem::create_directories(c.out_dir);
    Suite suite(suite_options(c, corrupt_schedule));
    try {
        prefetch_exact(suite);
        for (int g = 1; g <= kGroupCount; ++g) run_group(suite, g);
    } catch (const horizon_error& e) {
        log << "verify: horizon exhausted: " << e.what() << '\n';
        return kExhausted;
    } catch (const capacity_error& e) {
        log << "verify: capacity exceeded: " << e.what() << '\n';
        return kExhausted;
    }
    CsvWriter out(std::filesystem::path(c.out_dir) / "verify.csv", c,
                  {"group", "check", "params", "value", "limit", "margin", "pass", "kind"});
    std::size_t failed = 0, advisory_failed = 0;
    for (const auto& r : suite.rows) {
        out.row({std::to_string(r.group), r.check, r.params, num(r.value), num(r.limit), num(r.margin),
                 r.pass ? "1" : "0", r.diagnostic ? "diagnostic" : r.advisory ? "advisory" : "required"});
        if (r.pass || r.diagnostic) continue;
        if (r.advisory) {
            ++advisory_failed;
            continue;
        }
        ++failed;
        log << "FAILED " << r.check << " [" << r.params << "]: value " << num(r.value) << " vs limit " << num(r.limit)
            << '\n';
    }
    log << "verify: " << suite.rows.size() << " checks, " << failed << " failed";
    if (advisory_failed) log << ", " << advisory_failed << " advisory rows outside their bound";
    log << '\n';
    return failed ? kVerifyFailed : kOk;
}

/// Coupled-chain campaigns. One campaign per (n, beta); n comes from the sweep
/// list when given, else from the game.
inline int run_simulate(const ExperimentConfig& c) {
    validate(c);
    std::vector<std::size_t> sizes = c.n_sweep;
    if (sizes.empty()) sizes.push_back(players(c.game));
    struct Campaign {
        std::size_t n;
        double beta;
        std::vector<CoupledState> pairs;
        std::vector<std::vector<std::uint64_t>> tau;
    };
    std::vector<Campaign> runs;
    for (std::size_t n : sizes)
        for (double b : c.beta_grid) runs.push_back({n, b, {}, {}});
    for (std::size_t k = 0; k < runs.size(); ++k) {
        GameConfig gc = c.game;
        gc.n = runs[k].n;
        const auto game = make_game(gc);
        if (!game.two_strategy()) throw config_error("simulate needs a game with two strategies per player");
        const std::uint64_t seed = Rng::stream(c.seed, k)();
        runs[k].pairs = coupling_start_pairs(game, seed, c.random_pairs);
        runs[k].tau = coalescence_samples(game, runs[k].pairs, Beta(runs[k].beta), c.trials, c.sim_horizon, seed, c.workers);
    }
    std::filesystem::create_directories(c.out_dir);
    CsvWriter out(std::filesystem::path(c.out_dir) / "simulate.csv", c,
                  {"n", "beta", "pair", "start_x", "start_y", "trial", "tau", "coalesced"});
    CsvWriter sum(std::filesystem::path(c.out_dir) / "simulate_summary.csv", c,
                  {"n", "beta", "pairs", "trials", "timeouts", "mean_tau", "q50", "q90", "q99", "max_tau",
                   "p_tau_le_3_min", "wilson_lo", "wilson_hi", "t_upper", "mean_over_nlogn"});
    for (const auto& r : runs) {
        std::vector<double> all;
        double p3_min = 1.0;
        std::size_t p3_hits = 0;
        for (std::size_t p = 0; p < r.pairs.size(); ++p) {
            std::size_t hits = 0;
            for (std::size_t t = 0; t < r.tau[p].size(); ++t) {
                const auto tau = r.tau[p][t];
                const bool met = tau <= c.sim_horizon;
                out.row({num(static_cast<std::uint64_t>(r.n)), num(r.beta), std::to_string(p), to_string(r.pairs[p].x),
                         to_string(r.pairs[p].y), std::to_string(t), met ? num(tau) : "", met ? "1" : "0"});
                if (met) all.push_back(static_cast<double>(tau));
                if (tau <= 3) ++hits;
            }
            const double frac = static_cast<double>(hits) / static_cast<double>(r.tau[p].size());
            if (p == 0 || frac < p3_min) {
                p3_min = frac;
                p3_hits = hits;
            }
        }
        const auto est = coupling_estimate_from_samples(r.tau, c.sim_horizon, c.epsilon);
        const auto ci = wilson_interval(p3_hits, c.trials);
        const double nn = static_cast<double>(r.n);
        const bool any = !all.empty();
        sum.row({num(static_cast<std::uint64_t>(r.n)), num(r.beta), std::to_string(r.pairs.size()),
                 std::to_string(c.trials), std::to_string(est.timeouts), any ? num(est.mean_tau) : "",
                 any ? num(quantile(all, 0.5)) : "", any ? num(quantile(all, 0.9)) : "",
                 any ? num(quantile(all, 0.99)) : "", any ? num(*std::max_element(all.begin(), all.end())) : "",
                 num(p3_min), num(ci.lo), num(ci.hi), est.t_upper ? num(*est.t_upper) : "",
                 r.n >= 2 && any ? num(est.mean_tau / (nn * std::log(nn))) : ""});
    }
    return kOk;
}

/// Wide per-beta table plus the OR schedule and XOR passage-time tables.
inline int run_sweep(const ExperimentConfig& c) {
    validate(c);
    const auto game = make_game(c.game);
    std::filesystem::create_directories(c.out_dir);
    const auto points = parallel_map(
        c.beta_grid.size(), [&](std::size_t k) { return analyze_point(c, game, c.beta_grid[k]); }, c.workers);
    std::vector<std::string> cols{"beta"};
    for (const auto& q : points.front()) cols.push_back(q.name);
    CsvWriter out(std::filesystem::path(c.out_dir) / "sweep.csv", c, cols);
    for (std::size_t k = 0; k < points.size(); ++k) {
        std::vector<std::string> row{num(c.beta_grid[k])};
        for (const auto& q : points[k]) row.push_back(q.status == "ok" ? num(q.value) : "NA");
        out.row(row);
    }
    if (c.game.name == "or" && c.game.n >= 3) {
        const std::size_t n = c.game.n;
        CsvWriter sched(std::filesystem::path(c.out_dir) / "or_schedules.csv", c,
                        {"beta", "schedule", "k", "delta", "lhs", "rhs", "pass"});
        for (double b : c.beta_grid)
            for (const auto& w : {weights_large_beta(n), weights_log_beta(n, b), weights_small_beta(n, 0.2)})
                for (const auto& row : check_edge_inequalities(n, b, w).rows)
                    sched.row({num(b), w.label, std::to_string(row.k), num(w.delta(row.k)), num(row.lhs), num(row.rhs),
                               row.pass ? "1" : "0"});
        CsvWriter gam(std::filesystem::path(c.out_dir) / "or_gammas.csv", c, {"beta", "k", "gamma"});
        for (double b : c.beta_grid) {
            const auto g = gamma_sequence(n, b);
            for (std::size_t k = 1; k <= g.size(); ++k) gam.row({num(b), std::to_string(k), num(g[k - 1])});
        }
    }
    if (c.game.name == "xor") {
        CsvWriter xs(std::filesystem::path(c.out_dir) / "xor_passage.csv", c, {"beta", "ell", "nu", "mu"});
        for (double b : c.beta_grid) {
            const std::size_t n = c.game.n;
            for (std::size_t l = 1; 2 * l - 1 <= n; ++l)
                xs.row({num(b), std::to_string(l), num(nu_closed_form(n, b, l)),
                        2 * l <= n ? num(mu_closed_form(n, b, l)) : ""});
        }
    }
    return kOk;
}

}  // namespace logitdyn::cli
