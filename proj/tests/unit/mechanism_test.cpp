#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "screening/deadline.hpp"
#include "screening/errors.hpp"
#include "screening/mechanism.hpp"

using namespace screening;

namespace {

struct RandomStep {
    std::vector<double> grid;
    std::vector<double> levels;
};

RandomStep random_step(std::mt19937& rng, double lo, double hi, int max_cells = 6) {
    std::uniform_real_distribution<double> lv(lo, hi);
    std::uniform_real_distribution<double> dt(0.05, 1.0);
    std::uniform_int_distribution<int> cells(1, max_cells);
    RandomStep s{{0.0}, {lv(rng)}};
    const int n = cells(rng);
    for (int i = 1; i < n; ++i) {
        s.grid.push_back(s.grid.back() + dt(rng));
        s.levels.push_back(lv(rng));
    }
    return s;
}

oracle::Step as_oracle(const Mechanism& m) {
    return {std::vector<double>(m.grid().begin(), m.grid().end()),
            std::vector<double>(m.levels().begin(), m.levels().end())};
}

}  // namespace

TEST(Mechanism, RejectsBadInput) {
    EXPECT_THROW(Mechanism({0.0, 1.0}, {1.0}, 1.0), Error);
    EXPECT_THROW(Mechanism({0.5}, {1.0}, 1.0), Error);
    EXPECT_THROW(Mechanism({0.0, 1.0, 1.0}, {1, 1, 1}, 1.0), Error);
    EXPECT_THROW(Mechanism({0.0}, {-0.1}, 1.0), Error);
    EXPECT_THROW(Mechanism({0.0}, {1.0}, 0.0), Error);
}

TEST(ContinuationValue, ConstantFlow) {
    const Mechanism m({0.0, 1.0, 2.5}, {0.7, 0.7, 0.7}, 0.8);
    for (double t : {0.0, 0.3, 1.0, 2.0, 2.5, 10.0}) EXPECT_NEAR(m.continuation_value(t), 0.7, 1e-15);
}

TEST(ContinuationValue, InstanceADeadline) {
    const auto a = fixtures::instance_a();
    const Mechanism m = to_mechanism(DeadlineSpec::of(a, 2.0));
    const double quad = oracle::continuation_quad(as_oracle(m), 1.0, 0.0);
    EXPECT_NEAR(quad, 0.9052653017343711, 1e-10);
    EXPECT_NEAR(m.continuation_value(0.0), 0.9052653017343711, 1e-15);
    EXPECT_DOUBLE_EQ(m.continuation_value(2.0), 0.3);
    EXPECT_DOUBLE_EQ(m.continuation_value(7.0), 0.3);
}

TEST(ContinuationValue, MatchesQuadratureOnRandomSteps) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> tt(0.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto s = random_step(rng, 0.0, 2.0);
        const Mechanism m(s.grid, s.levels, 0.7);
        const double t = tt(rng);
        EXPECT_NEAR(m.continuation_value(t), oracle::continuation_quad(as_oracle(m), 0.7, t), 1e-9);
    }
}

TEST(ContinuationValue, ConvexCombinationAndMonotone) {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        auto s = random_step(rng, 0.0, 2.0);
        const bool decreasing = rep % 2 == 0;
        if (decreasing) std::sort(s.levels.begin(), s.levels.end(), std::greater<>());
        const Mechanism m(s.grid, s.levels, 1.3);
        const double lo = *std::min_element(s.levels.begin(), s.levels.end());
        const double hi = *std::max_element(s.levels.begin(), s.levels.end());
        double prev = m.continuation_value(0.0);
        for (int i = 0; i <= 200; ++i) {
            const double t = 0.03 * i;
            const double x = m.continuation_value(t);
            EXPECT_GE(x, lo - 1e-14);
            EXPECT_LE(x, hi + 1e-14);
            if (decreasing) EXPECT_LE(x, prev + 1e-14);
            prev = x;
        }
    }
}

TEST(IcCheck, MaterializedRewardIsIndifferent) {
    const Mechanism m = Mechanism({0.0, 0.5, 1.7}, {1.0, 0.6, 0.3}, 1.0).with_materialized_reward();
    const IcReport rep = ic_check(m);
    EXPECT_TRUE(rep.ic);
    for (const auto& [t, h] : rep.h_values) EXPECT_NEAR(h, 0.0, 1e-15) << t;
    for (double t : {0.0, 0.2, 0.5, 1.0, 1.7, 3.0}) EXPECT_NEAR(m.reward(t), m.continuation_value(t), 1e-15);
}

TEST(IcCheck, FirstBestFailsNonDisclosure) {
    const std::vector<double> reward{0.8};
    const IcReport rep = ic_check(Mechanism::constant(1.0, 1.0).with_constant_reward(reward));
    EXPECT_FALSE(rep.ic);
    EXPECT_EQ(rep.clause, IcClause::NonDisclosure);
    EXPECT_EQ(rep.violation_time, 0.0);
}

TEST(IcCheck, PositiveDecreasingH) {
    const std::vector<double> reward{0.9};
    const IcReport rep = ic_check(Mechanism::constant(0.3, 1.0).with_constant_reward(reward));
    EXPECT_TRUE(rep.ic);
    ASSERT_FALSE(rep.h_values.empty());
    EXPECT_NEAR(rep.h_values.front().second, 0.6, 1e-15);
}

TEST(IcCheck, UpwardJumpIsDelayViolation) {
    const std::vector<double> reward{0.5, 0.9};
    const IcReport rep = ic_check(Mechanism({0.0, 1.0}, {0.3, 0.3}, 1.0).with_constant_reward(reward));
    EXPECT_FALSE(rep.ic);
    EXPECT_EQ(rep.clause, IcClause::Delay);
    EXPECT_DOUBLE_EQ(*rep.violation_time, 1.0);
}

TEST(IcCheck, RisingWithinCellIsDelayViolation) {
    const IcReport rep =
        ic_check(Mechanism({0.0, 1.0}, {0.0, 3.0}, 1.0).with_reward({{5.0, 0.0}, {2.9, 1.0}}));
    EXPECT_FALSE(rep.ic);
    EXPECT_EQ(rep.clause, IcClause::Delay);
    EXPECT_DOUBLE_EQ(*rep.violation_time, 1.0);
}

TEST(IcCheck, TieReportsNonDisclosureFirst) {
    const std::vector<double> reward{5.0, 2.0};
    const IcReport rep = ic_check(Mechanism({0.0, 1.0}, {1.0, 3.0}, 1.0).with_constant_reward(reward));
    EXPECT_FALSE(rep.ic);
    EXPECT_EQ(rep.clause, IcClause::NonDisclosure);
    EXPECT_DOUBLE_EQ(*rep.violation_time, 1.0);
}

TEST(IcCheck, CrossingTimeInsideCell) {
    // h = e^{-t} 0.5 - 0.25 crosses zero at ln 2
    const IcReport rep = ic_check(Mechanism::constant(0.5, 1.0).with_reward({{1.0, -0.25}}));
    EXPECT_FALSE(rep.ic);
    EXPECT_EQ(rep.clause, IcClause::NonDisclosure);
    EXPECT_NEAR(*rep.violation_time, std::log(2.0), 1e-14);
}

TEST(Payoff, FirstBestAtPointMass) {
    const auto a = fixtures::instance_a();
    const double T = 1.0 + std::log(3.5);
    const Mechanism m = to_mechanism(DeadlineSpec::of(a, T));
    const auto g = BreakthroughDist::point(1.0);
    const PayoffBreakdown pb = payoff(m, a, g);
    EXPECT_NEAR(m.continuation_value(1.0), 0.8, 1e-15);
    EXPECT_NEAR(pb.total.value(), 1.147151776468577, 1e-12);
    const double quad = oracle::payoff_quad(
        as_oracle(m), 1.0, [&](double u) { return a.f0.at(u); }, [&](double u) { return a.f1.at(u); }, {{1.0, 1.0}});
    EXPECT_NEAR(quad, pb.total.value(), 1e-9);
    EXPECT_FALSE(pb.off_domain);
}

TEST(Payoff, ConstantPeakFlow) {
    const auto a = fixtures::instance_a();
    const Mechanism m = Mechanism::constant(a.u0, a.r);
    for (double t : {0.0, 0.4, 2.0}) {
        const double pi = payoff(m, a, BreakthroughDist::point(t)).total.value();
        EXPECT_NEAR(pi, (1 - std::exp(-t)) * a.f0.at(a.u0) + std::exp(-t) * a.f1.at(a.u0), 1e-14);
    }
}

TEST(Payoff, BreakdownSumsAndAffineIdentity) {
    const auto a = fixtures::instance_a();
    std::mt19937 rng(29);
    const auto g = BreakthroughDist::from_atoms({{0.2, 0.1}, {0.7, 0.3}, {1.1, 0.2}, {2.5, 0.4}});
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = random_step(rng, 0.0, 1.0);
        const Mechanism m(s.grid, s.levels, a.r);
        const PayoffBreakdown pb = payoff(m, a, g);
        double sum = 0.0;
        double identity = a.f0.at(m.continuation_value(0.0));
        for (const auto& row : pb.rows) {
            sum += row.p * (row.pre.value() + row.post.value());
            const double x = m.continuation_value(row.t);
            identity += row.p * std::exp(-a.r * row.t) * (a.f1.at(x) - a.f0.at(x));
        }
        EXPECT_NEAR(pb.total.value(), sum, 1e-12);
        EXPECT_NEAR(pb.total.value(), pb.pre_disclosure.value() + pb.post_disclosure.value(), 1e-12);
        EXPECT_NEAR(pb.total.value(), identity, 1e-10);
    }
}

TEST(Payoff, OffDomainIsFlagged) {
    const auto a = fixtures::instance_a();
    const PayoffBreakdown pb = payoff(Mechanism::constant(1.9, 1.0), a, BreakthroughDist::point(1.0));
    EXPECT_TRUE(pb.off_domain);
    EXPECT_TRUE(pb.total.is_neg_inf());
}

TEST(FrontLoad, InvertsDeadlineReward) {
    const auto a = fixtures::instance_a();
    const Mechanism m = Mechanism::constant(0.9052653017343711, 1.0);
    const FrontLoad fl = front_load(m, a);
    EXPECT_NEAR(fl.deadline.T, 2.0, 1e-12);
    EXPECT_TRUE(fl.f0_affine);
}

TEST(FrontLoad, Clamps) {
    const auto a = fixtures::instance_a();
    EXPECT_EQ(front_load(Mechanism::constant(0.1, 1.0), a).deadline.T, 0.0);
    EXPECT_EQ(front_load(Mechanism::constant(0.3, 1.0), a).deadline.T, 0.0);
    EXPECT_TRUE(front_load(Mechanism::constant(1.0, 1.0), a).deadline.is_infinite());
    EXPECT_THROW(front_load(Mechanism::constant(1.2, 1.0), a), Error);
    EXPECT_FALSE(front_load(Mechanism::constant(0.5, 1.0), fixtures::instance_b()).f0_affine);
}

TEST(FrontLoad, DominatesRandomSteps) {
    const auto a = fixtures::instance_a();
    std::mt19937 rng(31);
    std::vector<BreakthroughDist> gs;
    for (double t : {0.25, 0.75, 1.5, 3.0}) gs.push_back(BreakthroughDist::point(t));
    gs.push_back(BreakthroughDist::discretize(Exponential{1.0}, 16));
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = random_step(rng, a.u_star, a.u0);
        const Mechanism m(s.grid, s.levels, a.r);
        const Mechanism d = to_mechanism(front_load(m, a).deadline);
        for (const auto& g : gs) {
            EXPECT_GE(payoff(d, a, g).total.value(), payoff(m, a, g).total.value() - 1e-9);
        }
    }
}

TEST(FrontLoad, CapAtPeakNeverHurts) {
    const auto a = fixtures::instance_a();
    std::mt19937 rng(37);
    const auto g = BreakthroughDist::discretize(Exponential{1.0}, 16);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = random_step(rng, 0.0, 1.7);
        // the cap keeps the disclosure reward of the original
        const Mechanism m = Mechanism(s.grid, s.levels, a.r).with_materialized_reward();
        const Mechanism c = m.capped(a.u0);
        EXPECT_TRUE(ic_check(c).ic);
        EXPECT_GE(payoff(c, a, g).total.value(), payoff(m, a, g).total.value() - 1e-12);
        for (double t : {0.3, 1.0, 2.0}) {
            const auto p = BreakthroughDist::point(t);
            EXPECT_GE(payoff(c, a, p).total.value(), payoff(m, a, p).total.value() - 1e-12);
        }
    }
}

TEST(Export, CsvRows) {
    const Mechanism m({0.0, 1.0}, {1.0, 0.3}, 1.0);
    const std::vector<double> extra{0.5, 1.0, 2.0};
    const auto rows = sample(m, extra);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_DOUBLE_EQ(rows[1].t, 0.5);
    EXPECT_DOUBLE_EQ(rows[3].X, 0.3);
    std::ostringstream os;
    write_csv(os, rows);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "t,x,X,X1");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);
}
