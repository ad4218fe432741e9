#pragma once

// The concrete games: CK congestion game, 2x2 (anti-)coordination, Matching
// Pennies, Stairs, OR and XOR. All are 2-strategy games.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "logitdyn/error.hpp"
#include "logitdyn/game.hpp"

namespace logitdyn {

namespace detail {

inline std::size_t parity(const Profile& x) { return x.weight() % 2; }

// Facility loads of the CK game: index 0..2 are g_0..g_2, 3..5 are h_0..h_2.
inline std::array<int, 6> ck_loads(const Profile& x) {
    std::array<int, 6> load{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (x[i] == 0) {
            ++load[i];
            ++load[3 + i];
        } else {
            ++load[(i + 1) % 3];
            ++load[3 + (i + 2) % 3];
            ++load[3 + (i + 1) % 3];
        }
    }
    return load;
}

inline std::vector<std::size_t> binary_counts(std::size_t n) { return std::vector<std::size_t>(n, 2); }

}  // namespace detail

/// 3 players, 6 facilities. Strategy 0 = {g_i, h_i}; strategy 1 = {g_{i+1}, h_{i-1}, h_{i+1}}.
/// Utility is minus the summed load of the chosen facilities; the attached potential is
/// the negated Rosenthal sum so that utility differences equal potential differences.
inline GameSpec make_ck() {
    auto utility = [](std::size_t i, const Profile& x) {
        const auto load = detail::ck_loads(x);
        if (x[i] == 0) return -static_cast<double>(load[i] + load[3 + i]);
        return -static_cast<double>(load[(i + 1) % 3] + load[3 + (i + 2) % 3] + load[3 + (i + 1) % 3]);
    };
    auto potential = [](const Profile& x) {
        const auto load = detail::ck_loads(x);
        double rosenthal = 0.0;
        for (int l : load) rosenthal += 0.5 * l * (l + 1);
        return -rosenthal;
    };
    return GameSpec("ck", detail::binary_counts(3), utility, PotentialFn(potential));
}

namespace detail {

inline GameSpec make_two_by_two(std::string name, double a, double b, double c, double d) {
    // Row player is player 0. Payoffs: (0,0)->(a,a) (0,1)->(c,d) (1,0)->(d,c) (1,1)->(b,b).
    auto utility = [a, b, c, d](std::size_t i, const Profile& x) {
        const Strategy own = x[i];
        const Strategy other = x[1 - i];
        if (own == 0 && other == 0) return a;
        if (own == 1 && other == 1) return b;
        return own == 0 ? c : d;
    };
    auto potential = [a, b, c, d](const Profile& x) {
        if (x[0] == 0 && x[1] == 0) return a - d;
        if (x[0] == 1 && x[1] == 1) return b - c;
        return 0.0;
    };
    return GameSpec(std::move(name), binary_counts(2), utility, PotentialFn(potential));
}

}  // namespace detail

/// 2x2 coordination game. Requires a > d, b > c and a - d >= b - c.
inline GameSpec make_coordination(double a, double b, double c, double d) {
    if (!(a > d && b > c && a - d >= b - c))
        throw invalid_parameters("coordination game needs a > d, b > c and a - d >= b - c");
    return detail::make_two_by_two("coordination", a, b, c, d);
}

/// 2x2 anti-coordination game. Requires d > a, c > b and d - a >= c - b.
inline GameSpec make_anti_coordination(double a, double b, double c, double d) {
    if (!(d > a && c > b && d - a >= c - b))
        throw invalid_parameters("anti-coordination game needs d > a, c > b and d - a >= c - b");
    return detail::make_two_by_two("anti_coordination", a, b, c, d);
}

/// Strategy 0 = heads, 1 = tails. Player 0 wins on a match. No potential exists.
inline GameSpec make_matching_pennies() {
    auto utility = [](std::size_t i, const Profile& x) {
        const double row = (x[0] == x[1]) ? 1.0 : -1.0;
        return i == 0 ? row : -row;
    };
    return GameSpec("matching_pennies", detail::binary_counts(2), utility);
}

// Only the potential |x| is fixed for Stairs; u_i = |x| for every i reproduces its dynamics.
inline GameSpec make_stairs(std::size_t n) {
    if (n == 0) throw invalid_parameters("stairs game needs n >= 1");
    auto phi = [](const Profile& x) { return static_cast<double>(x.weight()); };
    auto utility = [phi](std::size_t, const Profile& x) { return phi(x); };
    return GameSpec("stairs", detail::binary_counts(n), utility, PotentialFn(phi));
}

/// Every player pays the OR of all strategies.
inline GameSpec make_or(std::size_t n) {
    if (n == 0) throw invalid_parameters("OR game needs n >= 1");
    auto phi = [](const Profile& x) { return x.weight() == 0 ? 0.0 : -1.0; };
    auto utility = [phi](std::size_t, const Profile& x) { return phi(x); };
    return GameSpec("or", detail::binary_counts(n), utility, PotentialFn(phi));
}

/// Every player pays the XOR of all strategies.
inline GameSpec make_xor(std::size_t n) {
    if (n == 0) throw invalid_parameters("XOR game needs n >= 1");
    auto phi = [](const Profile& x) { return detail::parity(x) == 0 ? 0.0 : -1.0; };
    auto utility = [phi](std::size_t, const Profile& x) { return phi(x); };
    return GameSpec("xor", detail::binary_counts(n), utility, PotentialFn(phi));
}

/// u_i + offsets[i]. The potential is carried over unchanged (still exact).
inline GameSpec translate_utilities(const GameSpec& game, std::vector<double> offsets) {
    if (offsets.size() != game.players()) throw dimension_error("one offset per player required");
    auto base = game.utility_fn();
    auto utility = [base, offsets = std::move(offsets)](std::size_t i, const Profile& x) {
        return base(i, x) + offsets[i];
    };
    return game.with_utility(game.name() + "+shift", utility, game.potential_fn());
}

/// alpha * u_i for every player; the potential scales with it.
inline GameSpec rescale_utilities(const GameSpec& game, double alpha) {
    if (!(alpha > 0.0)) throw invalid_parameters("rescaling factor must be positive");
    auto base = game.utility_fn();
    auto utility = [base, alpha](std::size_t i, const Profile& x) { return alpha * base(i, x); };
    std::optional<PotentialFn> potential;
    if (game.potential_fn()) {
        auto phi = *game.potential_fn();
        potential = PotentialFn([phi, alpha](const Profile& x) { return alpha * phi(x); });
    }
    return game.with_utility(game.name() + "*scale", utility, std::move(potential));
}

}  // namespace logitdyn
