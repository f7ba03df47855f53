#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "drgpb/oracle.hpp"
#include "drgpb/rng.hpp"
#include "drgpb/tvd.hpp"
#include "test_util.hpp"

using drgpb::LevelPartition;
using drgpb::RobustCase;
using drgpb::Vec;
using drgpb::WaterfillResult;

namespace {

Vec make_vec(std::initializer_list<double> vals) {
    Vec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

struct Instance {
    Vec mu;
    Vec L;
    double rtv = 0.0;
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_n(2, 6);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = pick_n(rng);

    Instance inst;
    inst.mu = drgpb_test::random_distribution(rng, n);
    if (unif(rng) < 0.25) {
        // Zero out some probability mass to hit empty-level corner cases.
        const int kill = 1 + static_cast<int>(unif(rng) * (n - 1));
        for (int i = 0; i < kill; ++i)
            inst.mu(static_cast<int>(unif(rng) * n) % n) = 0.0;
        if (inst.mu.sum() == 0.0) inst.mu(0) = 1.0;
        inst.mu /= inst.mu.sum();
    }

    inst.L.resize(n);
    const bool ties = unif(rng) < 0.3;
    for (int i = 0; i < n; ++i) {
        double v = 10.0 * unif(rng);
        if (ties) v = std::round(v);
        inst.L(i) = v;
    }

    const double u = unif(rng);
    if (u < 0.1)
        inst.rtv = 0.0;
    else if (u < 0.2)
        inst.rtv = 1.0;
    else
        inst.rtv = unif(rng);
    return inst;
}

} // namespace

TEST(TvdDistance, KnownValues) {
    const Vec p = make_vec({0.5, 0.3, 0.2});
    EXPECT_DOUBLE_EQ(drgpb::tvd_distance(p, p), 0.0);
    EXPECT_DOUBLE_EQ(
        drgpb::tvd_distance(make_vec({1.0, 0.0}), make_vec({0.0, 1.0})), 1.0);
    EXPECT_NEAR(drgpb::tvd_distance(p, make_vec({0.5, 0.5, 0.0})), 0.2, 1e-15);
    EXPECT_THROW(drgpb::tvd_distance(p, make_vec({1.0, 0.0})),
                 drgpb::ConfigError);
}

TEST(PartitionLevels, ThreeDistinctValues) {
    const LevelPartition part = drgpb::partition_levels(make_vec({1.0, 3.0, 2.0}));
    EXPECT_EQ(part.theta_top, std::vector<int>{1});
    EXPECT_DOUBLE_EQ(part.L_max, 3.0);
    ASSERT_EQ(part.levels.size(), 2u);
    EXPECT_EQ(part.levels[0].members, std::vector<int>{0});
    EXPECT_DOUBLE_EQ(part.levels[0].L, 1.0);
    EXPECT_EQ(part.levels[1].members, std::vector<int>{2});
    EXPECT_DOUBLE_EQ(part.levels[1].L, 2.0);
}

TEST(PartitionLevels, AllTiedCollapsesToSingleLevel) {
    const LevelPartition part = drgpb::partition_levels(make_vec({5.0, 5.0}));
    EXPECT_EQ(part.theta_top, (std::vector<int>{0, 1}));
    EXPECT_TRUE(part.levels.empty());
}

TEST(PartitionLevels, TwoLevelCase) {
    const LevelPartition part = drgpb::partition_levels(make_vec({1.0, 1.0, 9.0}));
    EXPECT_EQ(part.theta_top, std::vector<int>{2});
    ASSERT_EQ(part.levels.size(), 1u);
    EXPECT_EQ(part.levels[0].members, (std::vector<int>{0, 1}));
}

TEST(PartitionLevels, RelativeTieToleranceGroups) {
    const double base = 1e6;
    const LevelPartition part = drgpb::partition_levels(
        make_vec({base, base * (1.0 + 1e-10), 2.0 * base}));
    EXPECT_EQ(part.theta_top, std::vector<int>{2});
    ASSERT_EQ(part.levels.size(), 1u);
    EXPECT_EQ(part.levels[0].members, (std::vector<int>{0, 1}));
}

TEST(PartitionLevels, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(drgpb::partition_levels(Vec()), drgpb::ConfigError);
    Vec bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    EXPECT_THROW(drgpb::partition_levels(bad), drgpb::NumericalError);
}

TEST(Waterfill, ZeroRadiusReturnsMuBitExact) {
    auto rng = drgpb::make_stream(51, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec mu = drgpb_test::random_distribution(rng, 4);
        Vec L(4);
        std::uniform_real_distribution<double> unif(0.0, 10.0);
        for (int i = 0; i < 4; ++i) L(i) = unif(rng);
        const WaterfillResult res = drgpb::waterfill(mu, L, 0.0);
        for (int i = 0; i < 4; ++i) EXPECT_EQ(res.nu_star(i), mu(i));
        EXPECT_DOUBLE_EQ(res.alpha, 0.0);
        EXPECT_NEAR(res.value, mu.dot(L), 1e-14);
    }
}

TEST(Waterfill, HandInstanceModerateRadius) {
    const Vec mu = make_vec({0.5, 0.3, 0.2});
    const Vec L = make_vec({1.0, 3.0, 2.0});
    const WaterfillResult res = drgpb::waterfill(mu, L, 0.2);
    EXPECT_NEAR(res.alpha, 0.2, 1e-15);
    EXPECT_NEAR(res.nu_star(0), 0.3, 1e-15);
    EXPECT_NEAR(res.nu_star(1), 0.5, 1e-15);
    EXPECT_NEAR(res.nu_star(2), 0.2, 1e-15);
    EXPECT_NEAR(res.value, 2.2, 1e-15);
    EXPECT_NEAR(mu.dot(L), 1.8, 1e-15); // nominal for reference
    EXPECT_EQ(res.case_tag, RobustCase::one);
}

TEST(Waterfill, SaturatedBallPutsAllMassOnTop) {
    const Vec mu = make_vec({0.5, 0.3, 0.2});
    const Vec L = make_vec({1.0, 3.0, 2.0});
    const WaterfillResult res = drgpb::waterfill(mu, L, 1.0);
    EXPECT_NEAR(res.alpha, 0.7, 1e-15);
    EXPECT_NEAR(res.nu_star(0), 0.0, 1e-15);
    EXPECT_NEAR(res.nu_star(1), 1.0, 1e-15);
    EXPECT_NEAR(res.nu_star(2), 0.0, 1e-15);
    EXPECT_NEAR(res.value, 3.0, 1e-15);
}

TEST(Waterfill, ConstantLossesKeepNominal) {
    const Vec mu = make_vec({0.3, 0.45, 0.25});
    const WaterfillResult res = drgpb::waterfill(mu, make_vec({4.0, 4.0, 4.0}), 0.6);
    EXPECT_DOUBLE_EQ(res.alpha, 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(res.nu_star(i), mu(i));
    EXPECT_NEAR(res.value, 4.0, 1e-15);
    EXPECT_NEAR(res.value_equiv, 4.0, 1e-15);
}

TEST(Waterfill, TopSetWithZeroNominalMassGetsEqualShares) {
    // Modes 2 and 3 tie for the max loss but carry no nominal mass.
    const Vec mu = make_vec({1.0, 0.0, 0.0});
    const Vec L = make_vec({1.0, 7.0, 7.0});
    const WaterfillResult res = drgpb::waterfill(mu, L, 0.4);
    EXPECT_NEAR(res.alpha, 0.4, 1e-15);
    EXPECT_NEAR(res.nu_star(0), 0.6, 1e-15);
    EXPECT_NEAR(res.nu_star(1), 0.2, 1e-15);
    EXPECT_NEAR(res.nu_star(2), 0.2, 1e-15);
}

TEST(Waterfill, RejectsBadRadius) {
    const Vec mu = make_vec({0.5, 0.5});
    const Vec L = make_vec({1.0, 2.0});
    EXPECT_THROW(drgpb::waterfill(mu, L, -0.1), drgpb::ConfigError);
    EXPECT_THROW(drgpb::waterfill(mu, L, 1.1), drgpb::ConfigError);
}

TEST(RobustValueEquivalent, CaseOneHandInstance) {
    const Vec mu = make_vec({0.5, 0.3, 0.2});
    const LevelPartition part =
        drgpb::partition_levels(make_vec({1.0, 3.0, 2.0}));
    const auto eq = drgpb::robust_value_equivalent(mu, part, 0.2);
    EXPECT_EQ(eq.case_tag, RobustCase::one);
    EXPECT_DOUBLE_EQ(eq.beta, 0.0);
    EXPECT_NEAR(eq.value, 2.2, 1e-15);
}

TEST(RobustValueEquivalent, ZeroAlphaIsNominal) {
    const Vec mu = make_vec({0.5, 0.3, 0.2});
    const Vec L = make_vec({1.0, 3.0, 2.0});
    const auto eq =
        drgpb::robust_value_equivalent(mu, drgpb::partition_levels(L), 0.0);
    EXPECT_DOUBLE_EQ(eq.value, mu.dot(L));
}

TEST(RobustValueEquivalent, CaseTwoHandInstance) {
    const Vec mu = make_vec({0.5, 0.3, 0.2});
    const LevelPartition part =
        drgpb::partition_levels(make_vec({1.0, 3.0, 2.0}));
    const auto eq = drgpb::robust_value_equivalent(mu, part, 0.6);
    EXPECT_EQ(eq.case_tag, RobustCase::two);
    EXPECT_EQ(eq.z, 1);
    EXPECT_NEAR(eq.beta, 0.5, 1e-15);
    EXPECT_NEAR(eq.value, 2.9, 1e-15);
}

TEST(BruteForceOracle, KnownInstances) {
    const auto a =
        drgpb::brute_force_oracle(make_vec({0.5, 0.3, 0.2}),
                                  make_vec({1.0, 3.0, 2.0}), 0.0);
    EXPECT_NEAR(a.value, 1.8, 1e-12);
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(a.maximizer(i), make_vec({0.5, 0.3, 0.2})(i), 1e-12);

    const auto b =
        drgpb::brute_force_oracle(make_vec({0.5, 0.3, 0.2}),
                                  make_vec({1.0, 3.0, 2.0}), 0.2);
    EXPECT_NEAR(b.value, 2.2, 1e-12);
    EXPECT_NEAR(b.maximizer(0), 0.3, 1e-12);
    EXPECT_NEAR(b.maximizer(1), 0.5, 1e-12);
    EXPECT_NEAR(b.maximizer(2), 0.2, 1e-12);

    const auto c = drgpb::brute_force_oracle(make_vec({1.0, 0.0}),
                                             make_vec({1.0, 2.0}), 0.3);
    EXPECT_NEAR(c.value, 1.3, 1e-12);
    EXPECT_NEAR(c.maximizer(0), 0.7, 1e-12);
    EXPECT_NEAR(c.maximizer(1), 0.3, 1e-12);

    EXPECT_THROW(drgpb::brute_force_oracle(Vec::Constant(9, 1.0 / 9.0),
                                           Vec::Ones(9), 0.1),
                 drgpb::ConfigError);
}

TEST(WaterfillProperties, AgreesWithOracleOnRandomInstances) {
    auto rng = drgpb::make_stream(101, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const Instance inst = random_instance(rng);
        const WaterfillResult wf = drgpb::waterfill(inst.mu, inst.L, inst.rtv);
        const auto oracle = drgpb::brute_force_oracle(inst.mu, inst.L, inst.rtv);
        EXPECT_NEAR(wf.value, oracle.value, 1e-9)
            << "mu=" << inst.mu.transpose() << " L=" << inst.L.transpose()
            << " R=" << inst.rtv;
    }
}

TEST(WaterfillProperties, DirectAndLevelSetFormsAgreeAndStayFeasible) {
    auto rng = drgpb::make_stream(202, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const Instance inst = random_instance(rng);
        const WaterfillResult wf = drgpb::waterfill(inst.mu, inst.L, inst.rtv);
        EXPECT_NEAR(wf.value, wf.value_equiv,
                    1e-9 * std::max(1.0, std::abs(wf.value)));
        EXPECT_GE(wf.nu_star.minCoeff(), 0.0);
        EXPECT_NEAR(wf.nu_star.sum(), 1.0, 1e-12);
        EXPECT_LE(drgpb::tvd_distance(wf.nu_star, inst.mu), inst.rtv + 1e-12);
    }
}

TEST(WaterfillProperties, ValueNondecreasingInRadius) {
    auto rng = drgpb::make_stream(303, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = random_instance(rng);
        double prev = -std::numeric_limits<double>::infinity();
        for (int g = 0; g <= 10; ++g) {
            const double r = 0.1 * g;
            const double v = drgpb::waterfill(inst.mu, inst.L, r).value;
            EXPECT_GE(v, prev - 1e-10);
            prev = v;
        }
    }
}

TEST(WaterfillProperties, SaturationBeyondDrainableMass) {
    auto rng = drgpb::make_stream(404, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Instance inst = random_instance(rng);
        const auto part = drgpb::partition_levels(inst.L);
        double mu_top = 0.0;
        for (int j : part.theta_top) mu_top += inst.mu(j);
        const double r = std::min(1.0, 1.0 - mu_top + 1e-3);
        const WaterfillResult wf = drgpb::waterfill(inst.mu, inst.L, r);
        double nu_top = 0.0;
        for (int j : part.theta_top) nu_top += wf.nu_star(j);
        EXPECT_NEAR(nu_top, 1.0, 1e-12);
        EXPECT_NEAR(wf.value, part.L_max,
                    1e-9 * std::max(1.0, std::abs(part.L_max)));
    }
}
