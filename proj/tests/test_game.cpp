#include <gtest/gtest.h>

#include <set>

#include "logitdyn/closed_forms.hpp"
#include "logitdyn/game.hpp"
#include "logitdyn/games.hpp"
#include "oracles.hpp"

using namespace logitdyn;

TEST(Profile, WeightWithAndHamming) {
    const Profile x{1, 0, 1, 1};
    EXPECT_EQ(x.weight(), 3u);
    EXPECT_EQ(x.with(1, 1).weight(), 4u);
    EXPECT_EQ(hamming(x, Profile{0, 0, 1, 0}), 2u);
    EXPECT_THROW(hamming(x, Profile{0, 1}), dimension_error);
    EXPECT_EQ(to_string(x), "1011");
}

TEST(ProfileSpace, RoundTripAndOrder) {
    const GameSpec g("mixed", {2, 3, 4}, [](std::size_t, const Profile&) { return 0.0; });
    const ProfileSpace space(g);
    ASSERT_EQ(space.size(), 24u);
    const auto ref = oracle::all_profiles(g);
    for (std::size_t k = 0; k < space.size(); ++k) {
        EXPECT_EQ(space.encode(space.decode(k)), k);
        EXPECT_EQ(space.decode(k), ref[k]);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(space.strategy_at(k, i), ref[k][i]);
    }
    EXPECT_EQ(space.decode(1), (Profile{1, 0, 0}));
    EXPECT_EQ(space.with(0, 2, 3), space.encode(Profile{0, 0, 3}));
}

TEST(ProfileSpace, CapacityError) {
    EXPECT_THROW(ProfileSpace(make_or(21)), capacity_error);
    EXPECT_NO_THROW(ProfileSpace(make_or(20)));
    EXPECT_THROW(ProfileSpace(make_or(13), 4096), capacity_error);
    EXPECT_THROW(ProfileSpace(make_or(64)), capacity_error);
}

TEST(GameSpec, Validation) {
    const auto g = make_or(3);
    EXPECT_THROW(g.validate(Profile{0, 1}), invalid_profile);
    EXPECT_THROW(g.validate(Profile{0, 2, 0}), invalid_profile);
    EXPECT_THROW(social_welfare(g, Profile{0, 0}), invalid_profile);
    EXPECT_THROW(make_or(0), invalid_parameters);
    EXPECT_THROW(make_xor(0), invalid_parameters);
    EXPECT_THROW(make_stairs(0), invalid_parameters);
    EXPECT_THROW(GameSpec("bad", {2, 0}, [](std::size_t, const Profile&) { return 0.0; }), invalid_parameters);
    EXPECT_THROW(make_matching_pennies().potential(Profile{0, 0}), missing_potential);
}

TEST(CK, UtilitiesAndWelfare) {
    const auto g = make_ck();
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(g.utility(i, Profile{0, 0, 0}), -2.0);
        EXPECT_EQ(g.utility(i, Profile{1, 1, 1}), -5.0);
    }
    EXPECT_EQ(social_welfare(g, Profile{0, 0, 0}), -6.0);
    const ProfileSpace space(g);
    for (std::size_t k = 0; k < space.size(); ++k) {
        const Profile x = space.decode(k);
        EXPECT_EQ(social_welfare(g, x), closed_form::ck_level_welfare(x.weight())) << to_string(x);
    }
    EXPECT_TRUE(verify_exact_potential(g, *g.potential_fn()));
    const auto ne = pure_nash_equilibria(g);
    ASSERT_EQ(ne.size(), 2u);
    EXPECT_EQ(ne[0], (Profile{0, 0, 0}));
    EXPECT_EQ(ne[1], (Profile{1, 1, 1}));
}

TEST(CK, PotentialLevels) {
    // Phi by level: 0 -> -6, 1 -> -10, 2 -> -12, 3 -> -12 (negated Rosenthal sums).
    const auto g = make_ck();
    EXPECT_EQ(g.potential(Profile{0, 0, 0}), -6.0);
    EXPECT_EQ(g.potential(Profile{0, 1, 0}), -10.0);
    EXPECT_EQ(g.potential(Profile{1, 1, 0}), -12.0);
    EXPECT_EQ(g.potential(Profile{1, 1, 1}), -12.0);
}

TEST(Coordination, TableAndPotential) {
    const auto g = make_coordination(3, 2, 0, 0);
    EXPECT_EQ(g.potential(Profile{0, 0}), 3.0);
    EXPECT_EQ(g.potential(Profile{1, 1}), 2.0);
    EXPECT_EQ(g.potential(Profile{0, 1}), 0.0);
    EXPECT_TRUE(verify_exact_potential(g, *g.potential_fn()));
    EXPECT_EQ(pure_nash_equilibria(g), (std::vector<Profile>{{0, 0}, {1, 1}}));

    const auto h = make_coordination(5, 3, 1, 2);
    EXPECT_EQ(h.utility(0, Profile{0, 1}), 1.0);  // c
    EXPECT_EQ(h.utility(1, Profile{0, 1}), 2.0);  // d
    EXPECT_EQ(h.utility(0, Profile{1, 0}), 2.0);
    EXPECT_EQ(h.utility(1, Profile{1, 0}), 1.0);
    EXPECT_TRUE(verify_exact_potential(h, *h.potential_fn()));
    EXPECT_THROW(make_coordination(1, 3, 0, 0), invalid_parameters);
    EXPECT_THROW(make_coordination(0, 2, 0, 1), invalid_parameters);
}

TEST(AntiCoordination, EquilibriaAndPotential) {
    const auto g = make_anti_coordination(0, 0, 2, 3);
    EXPECT_EQ(pure_nash_equilibria(g), (std::vector<Profile>{{1, 0}, {0, 1}}));
    EXPECT_TRUE(verify_exact_potential(g, *g.potential_fn()));
    EXPECT_EQ(g.utility(0, Profile{0, 0}), 0.0);
    EXPECT_EQ(g.utility(0, Profile{0, 1}), 2.0);
    EXPECT_EQ(g.utility(1, Profile{0, 1}), 3.0);
    // Off-diagonal profiles carry the largest potential once shifted.
    const auto& phi = *g.potential_fn();
    EXPECT_GT(phi(Profile{0, 1}), phi(Profile{0, 0}));
    EXPECT_GT(phi(Profile{1, 0}), phi(Profile{1, 1}));
    EXPECT_THROW(make_anti_coordination(3, 2, 0, 0), invalid_parameters);
}

TEST(MatchingPennies, NotAPotentialGame) {
    const auto g = make_matching_pennies();
    EXPECT_EQ(g.utility(0, Profile{0, 0}), 1.0);
    EXPECT_EQ(g.utility(1, Profile{0, 0}), -1.0);
    const ProfileSpace space(g);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(social_welfare(g, space.decode(k)), 0.0);
    for (double c : {-2.0, 0.0, 1.0, 7.5})
        EXPECT_FALSE(verify_exact_potential(g, [c](const Profile&) { return c; }));
    EXPECT_TRUE(pure_nash_equilibria(g).empty());
}

TEST(Stairs, PotentialIsUpstairsCount) {
    const auto g = make_stairs(6);
    EXPECT_TRUE(verify_exact_potential(g, *g.potential_fn()));
    EXPECT_EQ(make_stairs(3).potential(Profile{1, 1, 0}), 2.0);
}

TEST(OrXor, PotentialsAndUtilities) {
    const auto o = make_or(5);
    EXPECT_TRUE(verify_exact_potential(o, [](const Profile& x) { return x.weight() == 0 ? 0.0 : -1.0; }));
    EXPECT_EQ(make_or(3).potential(Profile{0, 0, 0}), 0.0);
    EXPECT_EQ(make_or(3).potential(Profile{0, 1, 0}), -1.0);
    const auto x3 = make_xor(3);
    EXPECT_EQ(x3.utility(0, Profile{1, 1, 0}), 0.0);
    EXPECT_EQ(x3.utility(2, Profile{1, 0, 0}), -1.0);
    EXPECT_EQ(social_welfare(make_xor(4), Profile{0, 0, 0, 0}), 0.0);
    EXPECT_TRUE(verify_exact_potential(make_xor(6), *make_xor(6).potential_fn()));
}

TEST(NashCounts, OrXorAcrossN) {
    for (std::size_t n = 2; n <= 10; ++n) {
        EXPECT_EQ(pure_nash_equilibria(make_or(n)).size(), (std::size_t{1} << n) - n) << n;
        const auto xe = pure_nash_equilibria(make_xor(n));
        EXPECT_EQ(xe.size(), std::size_t{1} << (n - 1)) << n;
        for (const auto& x : xe) EXPECT_EQ(x.weight() % 2, 0u);
    }
    EXPECT_EQ(pure_nash_equilibria(make_ck()).size(), 2u);
}

TEST(Transforms, TranslateAndRescaleKeepPotential) {
    const auto g = make_ck();
    const auto shifted = translate_utilities(g, {1.0, -3.0, 0.5});
    EXPECT_EQ(shifted.utility(1, Profile{0, 0, 0}), -5.0);
    EXPECT_TRUE(verify_exact_potential(shifted, *shifted.potential_fn()));
    const auto scaled = rescale_utilities(g, 2.5);
    EXPECT_EQ(scaled.utility(0, Profile{1, 1, 1}), -12.5);
    EXPECT_TRUE(verify_exact_potential(scaled, *scaled.potential_fn()));
    EXPECT_THROW(translate_utilities(g, {1.0}), dimension_error);
    EXPECT_THROW(rescale_utilities(g, 0.0), invalid_parameters);
}
