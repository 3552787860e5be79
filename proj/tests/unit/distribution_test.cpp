#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "screening/distribution.hpp"
#include "screening/errors.hpp"

using namespace screening;

TEST(FromAtoms, PointMass) {
    const auto g = BreakthroughDist::from_atoms({{1, 1}});
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.atoms()[0].t, 1.0);
    EXPECT_EQ(g.atoms()[0].p, 1.0);
}

TEST(FromAtoms, SortsAndMergesAndNormalizes) {
    const auto g = BreakthroughDist::from_atoms({{2, 0.5}, {1, 0.5}});
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.atoms()[0].t, 1.0);
    EXPECT_EQ(g.atoms()[1].t, 2.0);

    const auto h = BreakthroughDist::from_atoms({{1, 2}, {1, 2}});
    ASSERT_EQ(h.size(), 1u);
    EXPECT_DOUBLE_EQ(h.atoms()[0].p, 1.0);

    const auto s = BreakthroughDist::from_atoms({{1.0, 1}, {1.0 + 1e-14, 1}});
    EXPECT_EQ(s.size(), 1u);
}

TEST(FromAtoms, Errors) {
    try {
        BreakthroughDist::from_atoms({{1, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDistribution);
    }
    EXPECT_THROW(BreakthroughDist::from_atoms({}), Error);
    EXPECT_THROW(BreakthroughDist::from_atoms({{-1, 1}}), Error);
    EXPECT_THROW(BreakthroughDist::from_atoms({{1, -1}, {2, 2}}), Error);
}

TEST(Discretize, ExponentialQuantiles) {
    const auto g1 = BreakthroughDist::discretize(Exponential{1.0}, 1);
    ASSERT_EQ(g1.size(), 1u);
    EXPECT_NEAR(g1.atoms()[0].t, std::log(2.0), 1e-12);

    const auto g2 = BreakthroughDist::discretize(Exponential{1.0}, 2);
    ASSERT_EQ(g2.size(), 2u);
    EXPECT_NEAR(g2.atoms()[0].t, -std::log(0.75), 1e-12);
    EXPECT_NEAR(g2.atoms()[1].t, -std::log(0.25), 1e-12);
    EXPECT_DOUBLE_EQ(g2.atoms()[0].p, 0.5);
}

TEST(Discretize, WeibullAndPoint) {
    const auto w = BreakthroughDist::discretize(Weibull{2.0, 3.0}, 1);
    EXPECT_NEAR(w.atoms()[0].t, 3.0 * std::sqrt(std::log(2.0)), 1e-12);
    for (int m : {1, 5, 40}) {
        const auto p = BreakthroughDist::discretize(PointMass{3.0}, m);
        ASSERT_EQ(p.size(), 1u);
        EXPECT_EQ(p.atoms()[0].t, 3.0);
    }
    EXPECT_THROW(BreakthroughDist::discretize(Exponential{0.0}, 4), Error);
    EXPECT_THROW(BreakthroughDist::discretize(Weibull{-1.0, 1.0}, 4), Error);
    EXPECT_THROW(BreakthroughDist::discretize(Exponential{1.0}, 0), Error);
}

TEST(Discretize, CdfErrorShrinks) {
    const double t = 0.9;
    auto err = [&](const Family& f, int m, double truth) {
        return std::abs(BreakthroughDist::discretize(f, m).cdf(t) - truth);
    };
    const double e_truth = 1 - std::exp(-t);
    const double w_truth = 1 - std::exp(-std::pow(t / 1.5, 2.0));
    for (const auto& [fam, truth] : std::vector<std::pair<Family, double>>{{Exponential{1.0}, e_truth},
                                                                         {Weibull{2.0, 1.5}, w_truth}}) {
        const double e4 = err(fam, 4, truth);
        const double e16 = err(fam, 16, truth);
        const double e64 = err(fam, 64, truth);
        EXPECT_LE(e16, e4);
        EXPECT_LE(e64, e16);
        EXPECT_LE(e64, 1.0 / 64);
    }
}

TEST(CondExpect, Examples) {
    const std::vector<double> phi1{5};
    EXPECT_DOUBLE_EQ(BreakthroughDist::point(1).cond_expect(0, phi1), 5.0);

    const auto g = BreakthroughDist::from_atoms({{1, 0.5}, {2, 0.5}});
    const std::vector<double> phi2{3, 7};
    EXPECT_DOUBLE_EQ(g.cond_expect(1, phi2), 7.0);

    const auto h = BreakthroughDist::from_atoms({{1, 0.25}, {2, 0.75}});
    const std::vector<double> phi3{4, 0};
    EXPECT_DOUBLE_EQ(h.cond_expect(0, phi3), 1.0);
}

TEST(CondExpect, NullConditioning) {
    const auto g = BreakthroughDist::from_atoms({{1, 0.5}, {2, 0.5}});
    const std::vector<double> phi{3, 7};
    try {
        (void)g.cond_expect(2, phi);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConditioningOnNull);
    }
}

TEST(Cdf, LeftAndRightLimits) {
    const auto g = BreakthroughDist::from_atoms({{1, 0.25}, {2, 0.75}});
    EXPECT_DOUBLE_EQ(g.cdf(1), 0.25);
    EXPECT_DOUBLE_EQ(g.cdf_left(1), 0.0);
    EXPECT_DOUBLE_EQ(g.survival(1), 0.75);
    EXPECT_DOUBLE_EQ(g.cdf(5), 1.0);
}

TEST(OrderChecks, Examples) {
    const auto g = BreakthroughDist::from_atoms({{1, 0.25}, {2, 0.75}});
    const auto gd = BreakthroughDist::from_atoms({{1, 0.75}, {2, 0.25}});
    const auto self = order_checks(g, g);
    EXPECT_TRUE(self.fosd);
    EXPECT_TRUE(self.mlr);

    const auto fwd = order_checks(g, gd);
    EXPECT_TRUE(fwd.fosd);
    EXPECT_TRUE(fwd.mlr);

    const auto back = order_checks(gd, g);
    EXPECT_FALSE(back.fosd);
    EXPECT_FALSE(back.mlr);
}

TEST(OrderChecks, UnequalSupports) {
    const auto g = BreakthroughDist::from_atoms({{1, 0.5}, {3, 0.5}});
    const auto gd = BreakthroughDist::from_atoms({{1, 0.5}, {2, 0.5}});
    const auto rep = order_checks(g, gd);
    EXPECT_FALSE(rep.mlr);
    EXPECT_FALSE(rep.mlr_reason.empty());
    EXPECT_TRUE(rep.fosd);
}

TEST(OrderChecks, MlrImpliesFosdOnRandomPairs) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    int mlr_count = 0;
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<Atom> a, b;
        for (int k = 1; k <= 4; ++k) {
            a.push_back({0.5 * k, unit(rng)});
            b.push_back({0.5 * k, unit(rng)});
        }
        const auto r = order_checks(BreakthroughDist::from_atoms(a), BreakthroughDist::from_atoms(b));
        if (r.mlr) {
            ++mlr_count;
            EXPECT_TRUE(r.fosd);
        }
    }
    EXPECT_GT(mlr_count, 0);
}
