#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "logitdyn/analysis.hpp"
#include "logitdyn/closed_forms.hpp"
#include "logitdyn/games.hpp"
#include "oracles.hpp"

using namespace logitdyn;

namespace {

std::vector<double> grid(std::size_t n) {
    const double ln = std::log(static_cast<double>(n));
    return {0.0, 0.1, 0.5, 1.0, 2.0, ln, 2.0 * ln, 5.0, 10.0};
}

struct Chain {
    GameSpec game;
    double beta;
};

std::vector<Chain> small_chains() {
    std::vector<Chain> out;
    for (double b : {0.0, 0.5, 2.0}) {
        out.push_back({make_ck(), b});
        out.push_back({make_coordination(3, 2, 0, 0), b});
        out.push_back({make_matching_pennies(), b});
        out.push_back({make_stairs(3), b});
        out.push_back({make_or(4), b});
        out.push_back({make_xor(4), b});
    }
    return out;
}

Distribution pi_of(const GameSpec& g, double b) {
    return g.has_potential() ? gibbs_stationary(g, Beta(b)) : stationary_solve(transition_matrix(g, Beta(b)));
}

}  // namespace

TEST(TvDistance, TrivialCases) {
    const auto a = Distribution::point_mass(3, 0);
    EXPECT_EQ(tv_distance(a, a), 0.0);
    EXPECT_EQ(tv_distance(a, Distribution::point_mass(3, 2)), 1.0);
    EXPECT_EQ(tv_distance(Distribution(std::vector<double>{0.5, 0.5}), Distribution(std::vector<double>{1.0, 0.0})), 0.5);
    EXPECT_THROW(tv_distance(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), dimension_error);
}

TEST(DOfT, MatchesOracleAndStartsAtOneMinusPiMin) {
    for (const auto& c : small_chains()) {
        const auto p = transition_matrix(c.game, Beta(c.beta));
        const auto pi = pi_of(c.game, c.beta);
        EXPECT_NEAR(d_of_t(p, pi, 0), 1.0 - pi.min(), 1e-15);
        const auto curve = distance_curve(p, pi, 8);
        for (std::uint64_t t = 0; t <= 8; ++t) {
            const double ref = oracle::d_of_t(p.dense(), pi.vector(), t);
            EXPECT_NEAR(d_of_t(p, pi, t), ref, 1e-13) << c.game.name() << " t=" << t;
            EXPECT_NEAR(curve[t], ref, 1e-13);
            if (t > 0) EXPECT_LE(curve[t], curve[t - 1] + 1e-12);
        }
    }
}

TEST(DOfT, MatchingPenniesThreeSteps) {
    for (double b : grid(2)) {
        const auto p = transition_matrix(make_matching_pennies(), Beta(b));
        const auto pi = stationary_solve(p);
        EXPECT_LT(tv_distance(pi, Distribution::uniform(4)), 1e-12);
        EXPECT_LE(d_of_t(p, pi, 3), 7.0 / 16.0) << b;
    }
}

TEST(MixingTime, MatchesLinearScanOracle) {
    for (const auto& c : small_chains()) {
        const auto p = transition_matrix(c.game, Beta(c.beta));
        const auto pi = pi_of(c.game, c.beta);
        for (double eps : {0.25, 0.1, 0.01}) {
            const auto want = oracle::t_mix(p.dense(), pi.vector(), eps, 100000);
            const auto r = mixing_time_exact(p, pi, eps);
            EXPECT_EQ(r.t_mix, want) << c.game.name() << " beta=" << c.beta << " eps=" << eps;
            ASSERT_TRUE(r.d_at(r.t_mix).has_value());
            EXPECT_LE(*r.d_at(r.t_mix), eps);
            if (r.t_mix > 0) {
                ASSERT_TRUE(r.d_at(r.t_mix - 1).has_value());
                EXPECT_GT(*r.d_at(r.t_mix - 1), eps);
            }
        }
    }
}

TEST(MixingTime, SquaringPathAgreesWithLinearScan) {
    // Force the doubling and bit-descent phase by disabling most linear stepping.
    MixingOptions opt;
    opt.linear_steps = 2;
    for (const auto& [g, b] : std::vector<Chain>{{make_or(4), 3.0},
                                                  {make_coordination(3, 2, 0, 0), 2.5},
                                                  {make_xor(5), 2.0},
                                                  {make_ck(), 1.0},
                                                  {make_stairs(5), 0.0}}) {
        const auto p = transition_matrix(g, Beta(b));
        const auto pi = gibbs_stationary(g, Beta(b));
        const auto want = oracle::t_mix(p.dense(), pi.vector(), 0.25, 1000000);
        const auto r = mixing_time_exact(p, pi, 0.25, opt);
        EXPECT_EQ(r.t_mix, want) << g.name();
        for (std::size_t k = 1; k < r.d_curve.size(); ++k)
            EXPECT_LE(r.d_curve[k].second, r.d_curve[k - 1].second + 1e-12);
    }
}

TEST(MixingTime, StairsTwoAtBetaZero) {
    const auto g = make_stairs(2);
    const auto p = transition_matrix(g, Beta(0.0));
    const auto pi = gibbs_stationary(g, Beta(0.0));
    // From 00 one step gives (1/2, 1/4, 1/4, 0) against the uniform law.
    EXPECT_NEAR(d_of_t(p, pi, 0), 0.75, 1e-15);
    EXPECT_NEAR(d_of_t(p, pi, 1), 0.25, 1e-15);
    EXPECT_EQ(mixing_time_exact(p, pi).t_mix, 1u);
}

TEST(MixingTime, ErrorsAndHorizon) {
    const auto g = make_or(4);
    const auto p = transition_matrix(g, Beta(8.0));
    const auto pi = gibbs_stationary(g, Beta(8.0));
    EXPECT_THROW(mixing_time_exact(p, pi, 0.5), invalid_parameters);
    EXPECT_THROW(mixing_time_exact(p, pi, 0.0), invalid_parameters);
    EXPECT_THROW(mixing_time_exact(p, Distribution::uniform(3)), dimension_error);
    MixingOptions opt;
    opt.horizon = 5;
    try {
        mixing_time_exact(p, pi, 0.25, opt);
        FAIL() << "expected horizon_error";
    } catch (const horizon_error& e) {
        EXPECT_GT(e.last_d(), 0.25);
    }
}

TEST(Welfare, ClosedFormsOnGrid) {
    EXPECT_NEAR(expected_social_welfare(make_ck(), gibbs_stationary(make_ck(), Beta(0.0))), -13.5, 1e-12);
    EXPECT_NEAR(closed_form::ck_welfare(0.0), -13.5, 1e-12);
    for (double b : grid(3)) {
        const auto ck = make_ck();
        EXPECT_LT(oracle::relative(expected_social_welfare(ck, gibbs_stationary(ck, Beta(b))), closed_form::ck_welfare(b)),
                  1e-10);
        for (const auto& abcd : std::vector<std::array<double, 4>>{{3, 2, 0, 0}, {5, 3, 1, 2}, {2, 2, 0, 0}}) {
            const auto g = make_coordination(abcd[0], abcd[1], abcd[2], abcd[3]);
            EXPECT_LT(oracle::relative(expected_social_welfare(g, gibbs_stationary(g, Beta(b))),
                                       closed_form::coordination_welfare(abcd[0], abcd[1], abcd[2], abcd[3], b)),
                      1e-10);
        }
    }
    for (std::size_t n = 2; n <= 10; ++n)
        for (double b : grid(n)) {
            const auto o = make_or(n);
            const auto x = make_xor(n);
            EXPECT_LT(oracle::relative(expected_social_welfare(o, gibbs_stationary(o, Beta(b))), closed_form::or_welfare(n, b)),
                      1e-10)
                << n << " " << b;
            EXPECT_LT(oracle::relative(expected_social_welfare(x, gibbs_stationary(x, Beta(b))), closed_form::xor_welfare(n, b)),
                      1e-10);
        }
    EXPECT_NEAR(closed_form::xor_welfare(7, 0.0), -3.5, 1e-15);
}

TEST(Welfare, CoordinationBeatsWorstEquilibriumPastThreshold) {
    for (const auto& abcd : std::vector<std::array<double, 4>>{{3, 2, 0, 0}, {5, 3, 1, 2}, {4, 1, 0, 0}, {6, 5, 1, 1}}) {
        const auto [a, b, c, d] = abcd;
        const double worst_nash = 2.0 * std::min(a, b);
        const double threshold = std::max(0.0, std::log((2 * b - c - d) / (a - b)) / (a - d));
        for (double step = 0.0; step <= 10.0; step += 0.5) {
            const double beta = threshold + step;
            EXPECT_GE(closed_form::coordination_welfare(a, b, c, d, beta) - worst_nash, -1e-12) << a << b << c << d;
        }
    }
}

TEST(Spectral, CoordinationLambdaAndSandwich) {
    for (const auto& abcd : std::vector<std::array<double, 4>>{{3, 2, 0, 0}, {5, 3, 1, 2}, {2, 2, 0, 0}, {4, 1, 0, 0}, {1, 1, 0, 0}}) {
        const auto [a, b, c, d] = abcd;
        for (double beta : grid(2)) {
            const auto g = make_coordination(a, b, c, d);
            const auto p = transition_matrix(g, Beta(beta));
            const auto pi = stationary_solve(p);
            const auto s = relaxation_bounds(p, pi);
            EXPECT_NEAR(s.lambda_star, closed_form::coordination_lambda(a, b, c, d, beta), 1e-9);
            EXPECT_NEAR(s.t_rel, 1.0 / (1.0 - s.lambda_star), 1e-9 * s.t_rel);
            EXPECT_LE(s.lower, s.upper);
            if (beta <= 5.0) {
                const auto t = static_cast<double>(mixing_time_exact(p, pi).t_mix);
                EXPECT_LE(s.lower, t);
                EXPECT_LE(t, s.upper);
            }
        }
    }
}

TEST(Spectral, MatchesGeneralEigenOracle) {
    for (const auto& c : small_chains()) {
        if (!c.game.has_potential()) continue;
        const auto p = transition_matrix(c.game, Beta(c.beta));
        const auto pi = gibbs_stationary(c.game, Beta(c.beta));
        const auto s = relaxation_bounds(p, pi);
        EXPECT_NEAR(s.lambda_star, oracle::lambda_star(p.dense()), 1e-9) << c.game.name() << " " << c.beta;
        const auto t = static_cast<double>(mixing_time_exact(p, pi).t_mix);
        EXPECT_LE(s.lower, t);
        EXPECT_LE(t, s.upper);
    }
    // OR n=2 at beta=0 is the uniform-update walk on the square: eigenvalues 1, 1/2, 1/2, 0.
    const auto p = transition_matrix(make_or(2), Beta(0.0));
    EXPECT_NEAR(relaxation_bounds(p, Distribution::uniform(4)).lambda_star, 0.5, 1e-12);
}

TEST(Spectral, RejectsNonReversible) {
    const auto p = transition_matrix(make_matching_pennies(), Beta(1.0));
    EXPECT_THROW(relaxation_bounds(p, stationary_solve(p)), reversibility_error);
}

TEST(Bottleneck, OrAndXorClosedForms) {
    for (std::size_t n = 3; n <= 10; ++n) {
        const auto g = make_or(n);
        for (double b : grid(n)) {
            const auto p = transition_matrix(g, Beta(b));
            const auto pi = gibbs_stationary(g, Beta(b));
            const std::vector<std::size_t> zero{0};
            const auto rest = complement(pi.size(), zero);
            EXPECT_NEAR(escape_ratio(p, pi, zero), closed_form::or_bottleneck_zero(b), 1e-12);
            EXPECT_NEAR(escape_ratio(p, pi, rest), closed_form::or_bottleneck_rest(n, b), 1e-12);
            if (pi[0] <= 0.5) EXPECT_NEAR(bottleneck_ratio(p, pi, zero), closed_form::or_bottleneck_zero(b), 1e-12);
            else EXPECT_THROW(bottleneck_ratio(p, pi, zero), invalid_set);
        }
    }
    for (std::size_t n = 2; n <= 8; ++n)
        for (double b : grid(n)) {
            const auto g = make_xor(n);
            const auto p = transition_matrix(g, Beta(b));
            const auto pi = gibbs_stationary(g, Beta(b));
            EXPECT_NEAR(bottleneck_ratio(p, pi, {0}), closed_form::xor_bottleneck_zero(b), 1e-12);
        }
}

TEST(Bottleneck, LowerBoundBelowExactMixing) {
    for (std::size_t n = 3; n <= 6; ++n)
        for (double b : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            const auto g = make_or(n);
            const auto p = transition_matrix(g, Beta(b));
            const auto pi = gibbs_stationary(g, Beta(b));
            const std::vector<std::size_t> zero{0};
            const std::vector<std::size_t> set = pi[0] <= 0.5 ? zero : complement(pi.size(), zero);
            const double lb = bottleneck_lower_bound(p, pi, set);
            EXPECT_LE(lb, static_cast<double>(mixing_time_exact(p, pi).t_mix)) << n << " " << b;
        }
    const auto g = make_or(6);
    const auto p = transition_matrix(g, Beta(0.5));
    const auto pi = gibbs_stationary(g, Beta(0.5));
    EXPECT_NEAR(bottleneck_lower_bound(p, pi, {0}), 0.25 * (1.0 + std::exp(0.5)), 1e-12);
    EXPECT_THROW(bottleneck_ratio(p, pi, {}), invalid_set);
    EXPECT_THROW(bottleneck_ratio(p, pi, {64}), invalid_set);
}
