#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "screening/discrete_oracle.hpp"
#include "screening/frontier.hpp"

using namespace screening;
using Q = boost::multiprecision::cpp_rational;
using discrete::Mech;
using discrete::SlackCase;

namespace {

Q q(int num, int den = 1) { return Q(num) / den; }

// Instance A frontiers in exact arithmetic.
discrete::Pair<Q> exact_a() {
    return {discrete::piecewise_linear<Q>({{q(0), q(0)}, {q(1), q(1)}, {q(2), q(0)}}),
            discrete::piecewise_linear<Q>({{q(0), q(3, 5)}, {q(3, 10), q(6, 5)}, {q(4, 5), q(7, 5)}, {q(9, 5), q(3, 5)}}),
            q(1), q(4, 5), q(3, 10)};
}

template <class S>
std::vector<S> all_payoffs(const Mech<S>& m, const discrete::Pair<S>& p, int t_max) {
    std::vector<S> v;
    for (int t = 0; t <= t_max; ++t) v.push_back(discrete::payoff_at(m, p, t));
    v.push_back(discrete::payoff_never(m, p));
    return v;
}

// Weakly better everywhere and strictly better at `strict_at` (index into all_payoffs).
void expect_improves(const Mech<Q>& before, const Mech<Q>& after, const discrete::Pair<Q>& p, int strict_at) {
    const auto a = all_payoffs(before, p, 6);
    const auto b = all_payoffs(after, p, 6);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_GE(b[i], a[i]) << i;
    EXPECT_GT(b[strict_at], a[strict_at]);
}

std::vector<double> grid9() {
    std::vector<double> g;
    for (int i = 0; i < 9; ++i) g.push_back(0.3 + 0.7 * i / 8);
    return g;
}

}  // namespace

TEST(IcDiscrete, IndifferenceFormHasNoSlack) {
    const auto m = discrete::materialize<Q>(q(1, 2), {q(1), q(3, 5), q(3, 10)});
    const auto ic = discrete::ic_discrete(m);
    EXPECT_TRUE(ic.ok);
    EXPECT_TRUE(ic.slack_periods.empty());
}

TEST(IcDiscrete, SlackEverywhere) {
    const Mech<Q> m{q(1, 2), {q(1), q(1)}, {q(2), q(2)}};
    const auto ic = discrete::ic_discrete(m);
    EXPECT_TRUE(ic.ok);
    EXPECT_EQ(ic.slack_periods, (std::vector<int>{0, 1}));
    EXPECT_EQ(discrete::delay_slack(m, 0), q(1, 2));
}

TEST(IcDiscrete, RewardBelowFlowFailsNonDisclosure) {
    const Mech<Q> m{q(1, 2), {q(1), q(1)}, {q(1, 2), q(1, 2)}};
    const auto ic = discrete::ic_discrete(m);
    EXPECT_FALSE(ic.ok);
    EXPECT_FALSE(ic.nondisclosure_ok);
}

TEST(ImproveSlack, LowerRewardTowardU1) {
    const auto p = exact_a();
    const Mech<Q> m{q(1, 2), {q(4, 5), q(4, 5)}, {q(19, 20), q(9, 10)}};
    const auto imp = discrete::improve_slack(m, p, SlackCase::LowerReward, 0);
    EXPECT_EQ(imp.slack_case, SlackCase::LowerReward);
    EXPECT_EQ(imp.delta, q(1, 10));
    EXPECT_EQ(imp.mech.X1[0], q(17, 20));
    EXPECT_TRUE(discrete::ic_discrete(imp.mech).ok);
    expect_improves(m, imp.mech, p, 0);
}

TEST(ImproveSlack, RaiseFlowTowardU1) {
    const auto p = exact_a();
    const Mech<Q> m{q(1, 2), {q(1, 2), q(1, 2)}, {q(7, 10), q(7, 10)}};
    const auto imp = discrete::improve_slack(m, p, SlackCase::RaiseFlow, 0);
    EXPECT_EQ(imp.delta, q(1, 5));
    EXPECT_EQ(imp.mech.x[0], q(7, 10));
    EXPECT_TRUE(discrete::ic_discrete(imp.mech).ok);
    expect_improves(m, imp.mech, p, 1);
}

TEST(ImproveSlack, RaiseNextRewardTowardU1) {
    const auto p = exact_a();
    const Mech<Q> m{q(1, 2), {q(1, 2), q(1, 2)}, {q(9, 10), q(3, 5)}};
    const auto imp = discrete::improve_slack(m, p, SlackCase::RaiseNextReward, 0);
    EXPECT_EQ(imp.delta, q(1, 5));
    EXPECT_EQ(imp.mech.X1[1], q(4, 5));
    EXPECT_TRUE(discrete::ic_discrete(imp.mech).ok);
    expect_improves(m, imp.mech, p, 1);
}

TEST(ImproveSlack, NothingToImprove) {
    const auto p = exact_a();
    const auto m = discrete::materialize<Q>(q(1, 2), {q(1), q(3, 10)});
    try {
        (void)discrete::improve_slack(m, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NothingToImprove);
    }
}

TEST(ImproveSlack, RandomMechanismsExact) {
    const auto p = exact_a();
    std::mt19937 rng(73);
    std::uniform_int_distribution<int> level(6, 20);  // twentieths in [0.3, 1]
    int improved = 0;
    for (int rep = 0; rep < 5000 && improved < 100; ++rep) {
        Mech<Q> m{q(1, 2), {}, {}};
        for (int s = 0; s < 3; ++s) {
            m.x.push_back(q(level(rng), 20));
            m.X1.push_back(q(level(rng), 20));
        }
        const auto ic = discrete::ic_discrete(m);
        if (!ic.ok || ic.slack_periods.empty()) continue;
        const auto imp = discrete::improve_slack(m, p);
        EXPECT_TRUE(discrete::ic_discrete(imp.mech).ok);
        EXPECT_GT(imp.delta, 0);
        const auto a = all_payoffs(m, p, 8);
        const auto b = all_payoffs(imp.mech, p, 8);
        bool strict = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_GE(b[i], a[i]);
            if (b[i] > a[i]) strict = true;
        }
        EXPECT_TRUE(strict);
        EXPECT_FALSE(discrete::dominates(discrete::payoff_vector(m, p), discrete::payoff_vector(imp.mech, p), Q(0)));
        ++improved;
    }
    EXPECT_EQ(improved, 100);
}

TEST(UndominatedScan, IndifferenceWithinOneGridStep) {
    const auto p = discrete::from_technology(fixtures::instance_a());
    const auto g = grid9();
    const auto res = discrete::undominated_scan<double>(p, 2, std::exp(-1.0), g, g);
    EXPECT_EQ(res.enumerated, 6561u);
    ASSERT_FALSE(res.undominated.empty());
    EXPECT_LE(res.indifference, g[1] - g[0]);
}

TEST(UndominatedScan, CoarseFlowGridLeavesTailSlack) {
    // Flows restricted to {u_star, u1, u0}: slack in the constant tail cannot
    // be removed on the grid, so indifference only holds to 5 reward steps.
    const auto p = discrete::from_technology(fixtures::instance_a());
    const auto res = discrete::undominated_scan<double>(p, 2, std::exp(-1.0), {0.3, 0.8, 1.0}, grid9());
    EXPECT_EQ(res.undominated.size(), 6u);
    EXPECT_NEAR(res.indifference, 0.4375, 1e-12);
}

TEST(UndominatedScan, OrderIndependent) {
    const auto p = discrete::from_technology(fixtures::instance_a());
    const auto g = grid9();
    const auto base = discrete::undominated_scan<double>(p, 2, std::exp(-1.0), {0.3, 0.8, 1.0}, g);
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto shuffled =
            discrete::undominated_scan<double>(p, 2, std::exp(-1.0), {0.3, 0.8, 1.0}, g, 1e-12, seed);
        ASSERT_EQ(shuffled.undominated.size(), base.undominated.size());
        for (std::size_t i = 0; i < base.undominated.size(); ++i) {
            EXPECT_EQ(shuffled.undominated[i].x, base.undominated[i].x);
            EXPECT_EQ(shuffled.undominated[i].X1, base.undominated[i].X1);
        }
    }
}

TEST(UndominatedScan, DeadlinesDominateUpToGrid) {
    // Affine f0: each undominated mechanism loses at most Lip(F1) * gap against
    // the discrete deadline mechanism with the same starting continuation value.
    const auto a = fixtures::instance_a();
    const auto p = discrete::from_technology(a);
    const double beta = std::exp(-1.0);
    const double lip = 2.0;
    for (const auto& xg : {std::vector<double>{0.3, 0.8, 1.0}, grid9()}) {
        const auto res = discrete::undominated_scan<double>(p, 3, beta, xg, grid9());
        for (std::size_t i = 0; i < res.undominated.size(); ++i) {
            const auto& m = res.undominated[i];
            const auto d = discrete::front_load(beta, a.u0, a.u_star, discrete::continuation(m)[0]);
            EXPECT_LE(discrete::shortfall(m, d, p, 200), lip * res.gaps[i] + 1e-12);
            if (res.gaps[i] == 0.0) EXPECT_LE(discrete::shortfall(m, d, p, 200), 1e-12);
        }
    }
}

TEST(UndominatedScan, FrontLoadExact) {
    const auto p = exact_a();
    const Q beta = q(1, 2);
    const auto m = discrete::materialize<Q>(beta, {q(4, 5), q(9, 10), q(1, 2)});
    const auto d = discrete::front_load(beta, p.u0, p.u_star, discrete::continuation(m)[0]);
    EXPECT_EQ(discrete::continuation(d)[0], discrete::continuation(m)[0]);
    EXPECT_LE(discrete::shortfall(m, d, p, 40), Q(0));
}

TEST(UndominatedScan, BudgetExceeded) {
    const auto p = discrete::from_technology(fixtures::instance_a());
    try {
        (void)discrete::undominated_scan<double>(p, 5, 0.5, grid9(), grid9());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
    }
}
