#pragma once

// Finite strategic games: profiles, the mixed-radix profile space, social
// welfare, exact-potential verification and pure Nash enumeration.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logitdyn/error.hpp"

namespace logitdyn {

using Strategy = std::uint32_t;

/// A pure strategy profile, one strategy index per player.
class Profile {
public:
    Profile() = default;
    explicit Profile(std::vector<Strategy> strategies) : s_(std::move(strategies)) {}
    Profile(std::initializer_list<Strategy> strategies) : s_(strategies) {}

    /// All players at strategy 0.
    static Profile zeros(std::size_t players) { return Profile(std::vector<Strategy>(players, 0)); }

    std::size_t size() const noexcept { return s_.size(); }
    Strategy operator[](std::size_t i) const { return s_[i]; }
    Strategy& operator[](std::size_t i) { return s_[i]; }
    std::span<const Strategy> strategies() const noexcept { return s_; }

    /// Number of players not at strategy 0 (|x| for 0/1 games).
    std::size_t weight() const noexcept {
        return static_cast<std::size_t>(std::count_if(s_.begin(), s_.end(), [](Strategy v) { return v != 0; }));
    }

    /// Copy with player `i` switched to `s`.
    Profile with(std::size_t i, Strategy s) const {
        Profile out = *this;
        out.s_[i] = s;
        return out;
    }

    auto operator<=>(const Profile&) const = default;

private:
    std::vector<Strategy> s_;
};

inline std::size_t hamming(const Profile& x, const Profile& y) {
    if (x.size() != y.size()) throw dimension_error("hamming: profiles of different length");
    std::size_t d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] != y[i]) ? 1 : 0;
    return d;
}

inline std::string to_string(const Profile& x) {
    std::string out;
    out.reserve(x.size());
    bool binary = std::all_of(x.strategies().begin(), x.strategies().end(), [](Strategy v) { return v < 10; });
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!binary && i > 0) out += '.';
        out += std::to_string(x[i]);
    }
    return out;
}

using UtilityFn = std::function<double(std::size_t player, const Profile& x)>;
using PotentialFn = std::function<double(const Profile& x)>;

/// A finite strategic game. Immutable after construction; oracles must be pure.
class GameSpec {
public:
    GameSpec(std::string name, std::vector<std::size_t> strategy_counts, UtilityFn utility,
             std::optional<PotentialFn> potential = std::nullopt)
        : name_(std::move(name)),
          counts_(std::move(strategy_counts)),
          utility_(std::move(utility)),
          potential_(std::move(potential)) {
        if (counts_.empty()) throw invalid_parameters("game must have at least one player");
        for (std::size_t c : counts_)
            if (c == 0) throw invalid_parameters("every player needs a non-empty strategy set");
        if (!utility_) throw invalid_parameters("game needs a utility oracle");
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t players() const noexcept { return counts_.size(); }
    std::size_t strategies(std::size_t player) const { return counts_.at(player); }
    std::span<const std::size_t> strategy_counts() const noexcept { return counts_; }

    bool two_strategy() const noexcept {
        return std::all_of(counts_.begin(), counts_.end(), [](std::size_t c) { return c == 2; });
    }

    /// Unchecked oracle call; callers validate the profile once up front.
    double utility(std::size_t player, const Profile& x) const { return utility_(player, x); }
    const UtilityFn& utility_fn() const noexcept { return utility_; }

    bool has_potential() const noexcept { return potential_.has_value(); }
    const std::optional<PotentialFn>& potential_fn() const noexcept { return potential_; }

    double potential(const Profile& x) const {
        if (!potential_) throw missing_potential("game '" + name_ + "' has no potential attached");
        return (*potential_)(x);
    }

    void validate(const Profile& x) const {
        if (x.size() != counts_.size())
            throw invalid_profile("profile has " + std::to_string(x.size()) + " entries, game '" + name_ +
                                  "' has " + std::to_string(counts_.size()) + " players");
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] >= counts_[i])
                throw invalid_profile("strategy " + std::to_string(x[i]) + " out of range for player " +
                                      std::to_string(i));
    }

    void validate_player(std::size_t player) const {
        if (player >= counts_.size())
            throw invalid_profile("player index " + std::to_string(player) + " out of range");
    }

    /// Same strategy sets, different payoffs.
    GameSpec with_utility(std::string name, UtilityFn utility, std::optional<PotentialFn> potential) const {
        return GameSpec(std::move(name), counts_, std::move(utility), std::move(potential));
    }

private:
    std::string name_;
    std::vector<std::size_t> counts_;
    UtilityFn utility_;
    std::optional<PotentialFn> potential_;
};

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// Bijection between profiles and [0, size). Mixed radix, player 0 least significant.
class ProfileSpace {
public:
    explicit ProfileSpace(const GameSpec& game, std::size_t cap = kDefaultEnumerationCap)
        : counts_(game.strategy_counts().begin(), game.strategy_counts().end()) {
        strides_.resize(counts_.size());
        std::size_t size = 1;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            strides_[i] = size;
            if (size > cap / counts_[i])
                throw capacity_error("profile space of '" + game.name() + "' exceeds cap of " +
                                     std::to_string(cap) + " profiles");
            size *= counts_[i];
        }
        if (size > cap)
            throw capacity_error("profile space of '" + game.name() + "' exceeds cap of " + std::to_string(cap) +
                                 " profiles");
        size_ = size;
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t players() const noexcept { return counts_.size(); }
    std::size_t stride(std::size_t player) const { return strides_[player]; }

    std::size_t encode(const Profile& x) const {
        if (x.size() != counts_.size()) throw invalid_profile("profile length does not match the space");
        std::size_t k = 0;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (x[i] >= counts_[i]) throw invalid_profile("strategy out of range in encode");
            k += strides_[i] * x[i];
        }
        return k;
    }

    Profile decode(std::size_t k) const {
        if (k >= size_) throw invalid_profile("profile index out of range");
        std::vector<Strategy> s(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            s[i] = static_cast<Strategy>(k % counts_[i]);
            k /= counts_[i];
        }
        return Profile(std::move(s));
    }

    /// Strategy of `player` inside the profile with index k.
    Strategy strategy_at(std::size_t k, std::size_t player) const {
        return static_cast<Strategy>((k / strides_[player]) % counts_[player]);
    }

    /// Index of the profile obtained from k by switching `player` to s.
    std::size_t with(std::size_t k, std::size_t player, Strategy s) const {
        const std::size_t current = strategy_at(k, player);
        return k - current * strides_[player] + static_cast<std::size_t>(s) * strides_[player];
    }

private:
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

inline double social_welfare(const GameSpec& game, const Profile& x) {
    game.validate(x);
    double w = 0.0;
    for (std::size_t i = 0; i < game.players(); ++i) w += game.utility(i, x);
    return w;
}

/// Largest violation of u_i(x) - u_i(y) = phi(x) - phi(y) over all unilateral deviations.
inline double potential_violation(const GameSpec& game, const PotentialFn& phi,
                                  std::size_t cap = kDefaultEnumerationCap) {
    const ProfileSpace space(game, cap);
    double worst = 0.0;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const Profile x = space.decode(k);
        const double phi_x = phi(x);
        for (std::size_t i = 0; i < game.players(); ++i) {
            const double u_x = game.utility(i, x);
            for (Strategy s = x[i] + 1; s < game.strategies(i); ++s) {
                const Profile y = x.with(i, s);
                const double diff = (u_x - game.utility(i, y)) - (phi_x - phi(y));
                if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
                worst = std::max(worst, std::abs(diff));
            }
        }
    }
    return worst;
}

inline bool verify_exact_potential(const GameSpec& game, const PotentialFn& phi,
                                   std::size_t cap = kDefaultEnumerationCap, double tol = 1e-12) {
    return potential_violation(game, phi, cap) <= tol;
}

/// Profiles where no player has a strictly improving unilateral deviation, in index order.
inline std::vector<Profile> pure_nash_equilibria(const GameSpec& game, std::size_t cap = kDefaultEnumerationCap) {
    const ProfileSpace space(game, cap);
    std::vector<Profile> out;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const Profile x = space.decode(k);
        bool stable = true;
        for (std::size_t i = 0; i < game.players() && stable; ++i) {
            const double u = game.utility(i, x);
            for (Strategy s = 0; s < game.strategies(i); ++s) {
                if (s == x[i]) continue;
                if (game.utility(i, x.with(i, s)) > u) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) out.push_back(x);
    }
    return out;
}

}  // namespace logitdyn
