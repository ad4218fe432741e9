#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "logitdyn/analysis.hpp"
#include "logitdyn/coupling.hpp"
#include "logitdyn/games.hpp"
#include "logitdyn/stats.hpp"
#include "logitdyn/xor_distance.hpp"

using namespace logitdyn;

namespace {

const std::vector<double> kCouplingBetas{0.0, 0.1, 0.5, 1.0, 2.0, std::log(3.0), 2.0 * std::log(3.0), 5.0, 10.0, 50.0};

std::vector<GameSpec> two_strategy_games() {
    return {make_ck(), make_coordination(3, 2, 0, 0), make_anti_coordination(0, 0, 2, 3), make_matching_pennies(),
            make_stairs(3), make_or(4), make_xor(4)};
}

}  // namespace

TEST(JointUpdate, MarginalsExhaustive) {
    for (const auto& g : two_strategy_games()) {
        const ProfileSpace space(g);
        for (double b : kCouplingBetas)
            for (std::size_t x = 0; x < space.size(); ++x)
                for (std::size_t y = 0; y < space.size(); ++y)
                    for (std::size_t i = 0; i < g.players(); ++i) {
                        const Profile px = space.decode(x);
                        const Profile py = space.decode(y);
                        const auto j = joint_update(g, px, py, i, Beta(b));
                        const auto sx = update_distribution(g, px, i, Beta(b));
                        const auto sy = update_distribution(g, py, i, Beta(b));
                        EXPECT_NEAR(j.sum(), 1.0, 1e-12);
                        EXPECT_NEAR(j.both0 + j.x0y1, sx[0], 1e-12);
                        EXPECT_NEAR(j.both0 + j.x1y0, sy[0], 1e-12);
                        EXPECT_NEAR(j.both1 + j.x1y0, sx[1], 1e-12);
                        EXPECT_TRUE(j.x0y1 == 0.0 || j.x1y0 == 0.0);
                        EXPECT_GE(std::min({j.both0, j.both1, j.x0y1, j.x1y0}), 0.0);
                        if (x == y) EXPECT_EQ(j.x0y1 + j.x1y0, 0.0);
                    }
    }
}

TEST(JointUpdate, OrTwoPlayerExample) {
    for (double b : kCouplingBetas) {
        const auto j = joint_update(make_or(2), Profile{0, 0}, Profile{0, 1}, 0, Beta(b));
        EXPECT_NEAR(j.both0, 0.5, 1e-15);
        EXPECT_NEAR(j.both1, 1.0 / (1.0 + std::exp(b)), 1e-15);
    }
    const auto j = joint_update(make_ck(), Profile{0, 0, 0}, Profile{1, 1, 1}, 2, Beta(0.0));
    EXPECT_EQ(j.both0, 0.5);
    EXPECT_EQ(j.both1, 0.5);
    EXPECT_EQ(j.x0y1 + j.x1y0, 0.0);
}

TEST(JointUpdate, RejectsWiderGames) {
    const GameSpec three("three", {3, 2}, [](std::size_t, const Profile&) { return 0.0; });
    EXPECT_THROW(joint_update(three, Profile{0, 0}, Profile{1, 0}, 0, Beta(1.0)), unsupported_game);
    EXPECT_THROW(coupling_product_matrix(three, Beta(1.0)), unsupported_game);
    EXPECT_THROW(joint_update(make_ck(), Profile{0, 0, 0}, Profile{1, 1, 1}, 3, Beta(1.0)), invalid_profile);
}

TEST(JointUpdate, MatchingOutcomesNeverIncreaseDistance) {
    const auto g = make_ck();
    const ProfileSpace space(g);
    for (double b : kCouplingBetas)
        for (std::size_t x = 0; x < space.size(); ++x)
            for (std::size_t y = 0; y < space.size(); ++y)
                for (std::size_t i = 0; i < 3; ++i) {
                    const Profile px = space.decode(x);
                    const Profile py = space.decode(y);
                    const auto j = joint_update(g, px, py, i, Beta(b));
                    const std::size_t before = hamming(px, py);
                    for (Strategy s : {0, 1})
                        if ((s == 0 ? j.both0 : j.both1) > 0.0) {
                            EXPECT_LE(hamming(px.with(i, s), py.with(i, s)), before);
                        }
                }
}

TEST(CoupledStep, CoalescedPairsStayTogether) {
    const auto g = make_xor(5);
    Rng rng(11);
    CoupledState s{Profile{1, 0, 1, 1, 0}, Profile{1, 0, 1, 1, 0}};
    for (int t = 0; t < 20000; ++t) {
        coupled_step(g, s, Beta(1.0), rng);
        ASSERT_TRUE(s.coalesced());
    }
    const auto again = coupled_step(g, static_cast<const CoupledState&>(s), Beta(1.0), rng);
    EXPECT_TRUE(again.coalesced());
}

TEST(CoupledStep, MarginalMatchesSingleChainChiSquare) {
    // One coupled step from a fixed pair, repeated; the x-side outcome must follow row x of P.
    const auto g = make_or(3);
    const ProfileSpace space(g);
    const auto p = transition_matrix(g, Beta(1.0));
    const Profile x0{0, 0, 0};
    const Profile y0{1, 1, 0};
    const std::size_t samples = 100000;
    std::map<std::size_t, std::size_t> hist_x, hist_y;
    Rng rng(20240);
    for (std::size_t k = 0; k < samples; ++k) {
        CoupledState s{x0, y0};
        coupled_step(g, s, Beta(1.0), rng);
        ++hist_x[space.encode(s.x)];
        ++hist_y[space.encode(s.y)];
    }
    auto chi2 = [&](const std::map<std::size_t, std::size_t>& hist, std::size_t from) {
        double stat = 0.0;
        std::size_t cells = 0;
        for (std::size_t z = 0; z < space.size(); ++z) {
            const double e = p(from, z) * static_cast<double>(samples);
            const auto it = hist.find(z);
            const double o = it == hist.end() ? 0.0 : static_cast<double>(it->second);
            if (e == 0.0) {
                EXPECT_EQ(o, 0.0);
                continue;
            }
            stat += (o - e) * (o - e) / e;
            ++cells;
        }
        EXPECT_EQ(cells, 4u);
        return stat;
    };
    // 0.999 quantile of chi-square with 3 degrees of freedom.
    EXPECT_LT(chi2(hist_x, space.encode(x0)), 16.27);
    EXPECT_LT(chi2(hist_y, space.encode(y0)), 16.27);
}

TEST(ProductMatrix, RowsAndMarginalization) {
    for (const auto& g : two_strategy_games())
        for (double b : {0.0, 0.7, 5.0}) {
            const auto k = coupling_product_matrix(g, Beta(b));
            const auto p = transition_matrix(g, Beta(b));
            const std::size_t m = p.size();
            ASSERT_EQ(k.size(), m * m);
            EXPECT_LT(k.stochasticity_error(), 1e-12);
            const Eigen::MatrixXd kd = k.dense();
            for (std::size_t x = 0; x < m; ++x)
                for (std::size_t y = 0; y < m; ++y) {
                    const auto row = static_cast<Eigen::Index>(x * m + y);
                    for (std::size_t z = 0; z < m; ++z) {
                        double left = 0.0, right = 0.0;
                        for (std::size_t w = 0; w < m; ++w) {
                            left += kd(row, static_cast<Eigen::Index>(z * m + w));
                            right += kd(row, static_cast<Eigen::Index>(w * m + z));
                        }
                        EXPECT_NEAR(left, p(x, z), 1e-12);
                        EXPECT_NEAR(right, p(y, z), 1e-12);
                        if (x == y) EXPECT_NEAR(kd(row, static_cast<Eigen::Index>(z * m + z)), p(x, z), 1e-12);
                    }
                }
        }
    EXPECT_THROW(coupling_product_matrix(make_or(9), Beta(1.0)), capacity_error);
}

TEST(ProductMatrix, CkThreeStepCoalescence) {
    const auto g = make_ck();
    for (double b : kCouplingBetas) {
        const auto k = coupling_product_matrix(g, Beta(b));
        ASSERT_EQ(k.size(), 64u);
        const auto prob = coalescence_probabilities(k, 8, 3);
        for (std::size_t s = 0; s < prob.size(); ++s) EXPECT_GE(prob[s], 1.0 / 36.0) << "beta=" << b << " pair=" << s;
    }
    EXPECT_THROW(coalescence_probabilities(coupling_product_matrix(g, Beta(1.0)), 7, 3), dimension_error);
}

TEST(CoalescenceTime, TrivialAndTimeout) {
    const auto g = make_or(5);
    Rng rng(3);
    EXPECT_EQ(coalescence_time(g, Profile::zeros(5), Profile::zeros(5), Beta(1.0), rng, 10), 0u);
    EXPECT_FALSE(coalescence_time(g, Profile::zeros(5), Profile{1, 1, 1, 1, 1}, Beta(1.0), rng, 0).has_value());
}

TEST(CoalescenceTime, CkEmpiricalThreeStepAgreesWithExact) {
    const auto g = make_ck();
    const ProfileSpace space(g);
    for (double b : {0.0, 1.0, 5.0}) {
        const auto exact = coalescence_probabilities(coupling_product_matrix(g, Beta(b)), 8, 3);
        const auto pairs = coupling_start_pairs(g, 5);
        ASSERT_EQ(pairs.size(), 28u);
        const auto samples = coalescence_samples(g, pairs, Beta(b), 4000, 3, 77);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            std::size_t met = 0;
            for (auto t : samples[k]) met += t <= 3 ? 1 : 0;
            const auto ci = wilson_interval(met, samples[k].size(), 3.29);
            const double want = exact[space.encode(pairs[k].x) * 8 + space.encode(pairs[k].y)];
            EXPECT_GE(ci.hi, 1.0 / 36.0);
            EXPECT_LE(ci.lo, want);
            EXPECT_GE(ci.hi, want);
        }
    }
}

TEST(CouplingEstimate, CkBoundedByGeometricConstant) {
    const auto g = make_ck();
    for (double b : kCouplingBetas) {
        const auto est = coupling_tmix_upper(g, Beta(b), 2000, 100000, 0.25, 9);
        ASSERT_TRUE(est.t_upper.has_value());
        EXPECT_LE(*est.t_upper, 108u) << b;
        const auto p = transition_matrix(g, Beta(b));
        const auto t = mixing_time_exact(p, gibbs_stationary(g, Beta(b))).t_mix;
        EXPECT_LE(static_cast<double>(t), 3.0 * 36.0 * std::log(4.0) + 1.0);
        EXPECT_GE(*est.t_upper, t) << b;
    }
}

TEST(CouplingEstimate, SmallValueAtBetaZero) {
    for (const auto& g : {make_or(6), make_xor(6), make_stairs(6)}) {
        const auto est = coupling_tmix_upper(g, Beta(0.0), 1000, 100000, 0.25, 4);
        ASSERT_TRUE(est.t_upper.has_value());
        EXPECT_LE(*est.t_upper, 40u);
        EXPECT_EQ(est.timeouts, 0u);
        EXPECT_EQ(est.pairs, 17u);
    }
}

TEST(CouplingEstimate, XorSixBetweenExponentialEnvelopes) {
    const std::size_t n = 6;
    for (double b : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        const auto est = coupling_tmix_upper(make_xor(n), Beta(b), 800, 10'000'000, 0.25, 21);
        ASSERT_TRUE(est.t_upper.has_value());
        const double t = static_cast<double>(*est.t_upper);
        EXPECT_GE(t, 0.5 * (1.0 + std::exp(b)) / 2.0) << b;
        EXPECT_LE(t, 4.0 * expected_coalescence_bound(n, b).exact_sum * 1.25) << b;
        EXPECT_LE(t, static_cast<double>(n * n * n) * std::exp(b)) << b;
    }
}

TEST(CouplingEstimate, StairsScalesLikeNLogN) {
    std::vector<double> ratios;
    for (std::size_t n : {4, 8, 16, 32, 64}) {
        const auto g = make_stairs(n);
        const auto pairs = coupling_start_pairs(g, 1);
        const auto samples = coalescence_samples(g, pairs, Beta(1.0), 200, 1'000'000, 13);
        double worst = 0.0;
        for (const auto& s : samples) {
            double total = 0.0;
            for (auto t : s) total += static_cast<double>(t);
            worst = std::max(worst, total / static_cast<double>(s.size()));
        }
        ratios.push_back(worst / (static_cast<double>(n) * std::log(static_cast<double>(n))));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    EXPECT_LT(*hi / *lo, 10.0);
}

TEST(CouplingEstimate, DeterministicAcrossWorkerCounts) {
    const auto g = make_or(6);
    const auto pairs = coupling_start_pairs(g, 8);
    const auto one = coalescence_samples(g, pairs, Beta(1.5), 50, 100000, 99, 1);
    const auto many = coalescence_samples(g, pairs, Beta(1.5), 50, 100000, 99, 4);
    EXPECT_EQ(one, many);
    const auto other = coalescence_samples(g, pairs, Beta(1.5), 50, 100000, 100, 1);
    EXPECT_NE(one, other);
    EXPECT_THROW(coupling_tmix_upper(g, Beta(1.0), 3, 100, 0.25, 1), invalid_parameters);
}
