#pragma once

// The standard two-chain coupling for 2-strategy games: both chains update the
// same player and share one uniform draw, so they agree with the largest
// probability the two marginals allow.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "logitdyn/error.hpp"
#include "logitdyn/game.hpp"
#include "logitdyn/kernel.hpp"
#include "logitdyn/parallel.hpp"
#include "logitdyn/random.hpp"
#include "logitdyn/stats.hpp"

namespace logitdyn {

struct CoupledState {
    Profile x;
    Profile y;
    bool coalesced() const { return x == y; }
};

/// Joint law of (x_i', y_i') for the selected player.
struct JointUpdate {
    double both0 = 0.0;
    double both1 = 0.0;
    double x0y1 = 0.0;
    double x1y0 = 0.0;

    double sum() const { return both0 + both1 + x0y1 + x1y0; }
};

namespace detail {

inline void require_two_strategy(const GameSpec& game) {
    if (!game.two_strategy())
        throw unsupported_game("coupling is defined for games where every player has two strategies");
}

inline JointUpdate joint_from_sigma(double sx0, double sy0) {
    JointUpdate j;
    j.both0 = std::min(sx0, sy0);
    j.both1 = std::min(1.0 - sx0, 1.0 - sy0);
    j.x0y1 = sx0 - j.both0;
    j.x1y0 = (1.0 - sx0) - j.both1;
    return j;
}

// sigma_i(0 | x), evaluated in place on x.
inline double sigma_zero(const GameSpec& game, Profile& x, std::size_t i, double beta, std::vector<double>& buf) {
    logit_weights(game, x, i, beta, buf);
    return buf[0];
}

// Maps a uniform draw to the outcome (x_i', y_i') in the order (0,0), (1,1), (0,1), (1,0).
inline std::pair<Strategy, Strategy> sample_joint(const JointUpdate& j, double u) {
    if (u < j.both0) return {0, 0};
    if (u < j.both0 + j.both1) return {1, 1};
    if (u < j.both0 + j.both1 + j.x0y1) return {0, 1};
    if (j.x1y0 > 0.0) return {1, 0};
    // Rounding left u past the table; fall back to the last outcome with mass.
    if (j.x0y1 > 0.0) return {0, 1};
    return j.both1 > 0.0 ? std::pair<Strategy, Strategy>{1, 1} : std::pair<Strategy, Strategy>{0, 0};
}

}  // namespace detail

inline JointUpdate joint_update(const GameSpec& game, const Profile& x, const Profile& y, std::size_t i, Beta beta) {
    detail::require_two_strategy(game);
    game.validate(x);
    game.validate(y);
    game.validate_player(i);
    Profile sx = x;
    Profile sy = y;
    std::vector<double> buf;
    const double sx0 = detail::sigma_zero(game, sx, i, beta.value(), buf);
    const double sy0 = detail::sigma_zero(game, sy, i, beta.value(), buf);
    return detail::joint_from_sigma(sx0, sy0);
}

/// One coupled move, in place. Coalesced states move as a single chain.
inline void coupled_step(const GameSpec& game, CoupledState& state, Beta beta, Rng& rng) {
    thread_local std::vector<double> buf;
    const auto i = static_cast<std::size_t>(rng.uniform_index(game.players()));
    const double u = rng.uniform01();
    const double sx0 = detail::sigma_zero(game, state.x, i, beta.value(), buf);
    if (state.x == state.y) {
        state.x[i] = state.y[i] = (u < sx0) ? 0 : 1;
        return;
    }
    const double sy0 = detail::sigma_zero(game, state.y, i, beta.value(), buf);
    const auto [a, b] = detail::sample_joint(detail::joint_from_sigma(sx0, sy0), u);
    state.x[i] = a;
    state.y[i] = b;
}

inline CoupledState coupled_step(const GameSpec& game, const CoupledState& state, Beta beta, Rng& rng) {
    CoupledState next = state;
    detail::require_two_strategy(game);
    game.validate(next.x);
    game.validate(next.y);
    coupled_step(game, next, beta, rng);
    return next;
}

inline constexpr std::size_t kPairCap = std::size_t{1} << 16;

/// Exact kernel of the coupled pair process over Omega x Omega, pair index x * |Omega| + y.
inline TransitionMatrix coupling_product_matrix(const GameSpec& game, Beta beta, std::size_t pair_cap = kPairCap) {
    detail::require_two_strategy(game);
    const ProfileSpace space(game, pair_cap);
    const std::size_t size = space.size();
    if (size > pair_cap / size) throw capacity_error("pair space exceeds cap of " + std::to_string(pair_cap));
    const std::size_t n = game.players();
    const double inv_n = 1.0 / static_cast<double>(n);
    // sigma_i(0 | x) for every profile and player.
    std::vector<double> s0(size * n);
    std::vector<double> buf;
    for (std::size_t k = 0; k < size; ++k) {
        Profile x = space.decode(k);
        for (std::size_t i = 0; i < n; ++i) s0[k * n + i] = detail::sigma_zero(game, x, i, beta.value(), buf);
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(size * size * (2 * n + 1));
    for (std::size_t x = 0; x < size; ++x)
        for (std::size_t y = 0; y < size; ++y) {
            const auto row = static_cast<int>(x * size + y);
            for (std::size_t i = 0; i < n; ++i) {
                const JointUpdate j = detail::joint_from_sigma(s0[x * n + i], s0[y * n + i]);
                const double w[4] = {j.both0, j.both1, j.x0y1, j.x1y0};
                const Strategy a[4] = {0, 1, 0, 1};
                const Strategy b[4] = {0, 1, 1, 0};
                for (int c = 0; c < 4; ++c) {
                    if (w[c] <= 0.0) continue;
                    const std::size_t nx = space.with(x, i, a[c]);
                    const std::size_t ny = space.with(y, i, b[c]);
                    entries.emplace_back(row, static_cast<int>(nx * size + ny), inv_n * w[c]);
                }
            }
        }
    const auto dim = static_cast<Eigen::Index>(size * size);
    SparseRowMatrix m(dim, dim);
    m.setFromTriplets(entries.begin(), entries.end());
    return TransitionMatrix(std::move(m));
}

/// P[tau <= steps] from every start pair, computed exactly on the product chain.
inline std::vector<double> coalescence_probabilities(const TransitionMatrix& product, std::size_t states,
                                                     std::uint64_t steps) {
    if (product.size() != states * states) throw dimension_error("product matrix does not match state count");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(product.size()));
    for (std::size_t x = 0; x < states; ++x) v[static_cast<Eigen::Index>(x * states + x)] = 1.0;
    for (std::uint64_t t = 0; t < steps; ++t) v = product.sparse() * v;
    return {v.data(), v.data() + v.size()};
}

/// First t with X_t = Y_t, or nothing if the chains have not met by `horizon`.
inline std::optional<std::uint64_t> coalescence_time(const GameSpec& game, const Profile& x, const Profile& y,
                                                     Beta beta, Rng& rng, std::uint64_t horizon) {
    detail::require_two_strategy(game);
    game.validate(x);
    game.validate(y);
    CoupledState s{x, y};
    for (std::uint64_t t = 0;; ++t) {
        if (s.x == s.y) return t;
        if (t >= horizon) return std::nullopt;
        coupled_step(game, s, beta, rng);
    }
}

inline Profile complement_profile(const Profile& x) {
    Profile out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1 - out[i];
    return out;
}

/// Start pairs for coupling estimates: every unordered pair when |Omega|^2 <= 256,
/// otherwise the all-0/all-1 pair, random antipodal pairs and random pairs.
inline std::vector<CoupledState> coupling_start_pairs(const GameSpec& game, std::uint64_t seed,
                                                      std::size_t random_pairs = 16) {
    detail::require_two_strategy(game);
    const std::size_t n = game.players();
    if (n <= 4) {
        const ProfileSpace space(game);
        std::vector<CoupledState> out;
        for (std::size_t x = 0; x < space.size(); ++x)
            for (std::size_t y = x + 1; y < space.size(); ++y) out.push_back({space.decode(x), space.decode(y)});
        return out;
    }
    std::vector<CoupledState> out;
    const Profile zero = Profile::zeros(n);
    out.push_back({zero, complement_profile(zero)});
    Rng rng = Rng::stream(seed, 0x9a1f);
    auto random_profile = [&] {
        Profile p = Profile::zeros(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Strategy>(rng.uniform_index(2));
        return p;
    };
    for (std::size_t k = 0; k < random_pairs; ++k) {
        Profile x = random_profile();
        if (k % 2 == 0) {
            out.push_back({x, complement_profile(x)});
        } else {
            Profile y = random_profile();
            if (x == y) y[0] = 1 - y[0];
            out.push_back({x, y});
        }
    }
    return out;
}

struct CouplingEstimate {
    /// Smallest t whose Wilson upper bound on max_pairs P[tau > t] is <= eps; nothing on timeout.
    std::optional<std::uint64_t> t_upper;
    std::size_t pairs = 0;
    std::size_t trials = 0;
    double mean_tau = 0.0;  // over all pairs and trials that coalesced
    std::size_t timeouts = 0;
};

/// Coalescence samples: result[p][k] is the k-th trial from start pair p, or
/// horizon + 1 for a timeout. Trial streams are keyed by (seed, p, k).
inline std::vector<std::vector<std::uint64_t>> coalescence_samples(const GameSpec& game,
                                                                   const std::vector<CoupledState>& pairs, Beta beta,
                                                                   std::size_t trials, std::uint64_t horizon,
                                                                   std::uint64_t seed, std::size_t workers = 0) {
    const auto flat = parallel_map(
        pairs.size() * trials,
        [&](std::size_t job) {
            Rng rng = Rng::stream(seed, job);
            const auto tau = coalescence_time(game, pairs[job / trials].x, pairs[job / trials].y, beta, rng, horizon);
            return tau ? *tau : horizon + 1;
        },
        workers);
    std::vector<std::vector<std::uint64_t>> out(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p)
        out[p].assign(flat.begin() + static_cast<std::ptrdiff_t>(p * trials),
                      flat.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials));
    return out;
}

/// Coupling estimate from existing samples (see coalescence_samples): the t_upper
/// rule takes, per pair, the (k_max+1)-th largest tau where k_max is the largest
/// exceedance count whose Wilson upper bound (z = 1.96) stays <= eps.
inline CouplingEstimate coupling_estimate_from_samples(std::vector<std::vector<std::uint64_t>> samples,
                                                       std::uint64_t horizon, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameters("epsilon must lie in (0, 1)");
    if (samples.empty() || samples.front().empty()) throw invalid_parameters("no coalescence samples");
    const std::size_t trials = samples.front().size();
    std::optional<std::size_t> k_max;
    for (std::size_t k = 0; k <= trials; ++k) {
        if (wilson_interval(k, trials).hi <= eps)
            k_max = k;
        else
            break;
    }
    if (!k_max) throw invalid_parameters("too few trials for a Wilson bound at this epsilon");
    CouplingEstimate est;
    est.pairs = samples.size();
    est.trials = trials;
    std::uint64_t worst = 0;
    double total = 0.0;
    std::size_t met = 0;
    for (auto& tau : samples) {
        if (tau.size() != trials) throw dimension_error("ragged coalescence samples");
        for (auto t : tau) {
            if (t > horizon)
                ++est.timeouts;
            else {
                total += static_cast<double>(t);
                ++met;
            }
        }
        std::sort(tau.begin(), tau.end(), std::greater<>());
        worst = std::max(worst, tau[*k_max]);
    }
    est.mean_tau = met ? total / static_cast<double>(met) : 0.0;
    if (worst <= horizon) est.t_upper = worst;
    return est;
}

/// Empirical coupling upper estimate of t_mix(eps). This is a statistical estimate
/// with a Wilson margin (z = 1.96), not a proof.
inline CouplingEstimate coupling_tmix_upper(const GameSpec& game, Beta beta, std::size_t trials,
                                            std::uint64_t horizon, double eps, std::uint64_t seed,
                                            std::size_t workers = 0) {
    if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameters("epsilon must lie in (0, 1)");
    if (trials == 0 || wilson_interval(0, trials).hi > eps)
        throw invalid_parameters("too few trials for a Wilson bound at this epsilon");
    const auto pairs = coupling_start_pairs(game, seed);
    return coupling_estimate_from_samples(coalescence_samples(game, pairs, beta, trials, horizon, seed, workers),
                                          horizon, eps);
}

}  // namespace logitdyn
