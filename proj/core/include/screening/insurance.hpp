#pragma once

#include <iosfwd>
#include <vector>

#include "screening/distribution.hpp"
#include "screening/euler.hpp"
#include "screening/frontier.hpp"
#include "screening/mechanism.hpp"

namespace screening::insurance {

/// phi(C) = C^a, kappa(L) = L^b, wage w, shadow value of public funds.
struct UiPrimitives {
    double a = 0.5;
    double b = 2.0;
    double w = 1.0;
    double shadow = 0.5;
    double r = 1.0;
};

/// Throws InvalidArgument unless a in (0,1), b > 1, w > 0, shadow > 0, r > 0.
void validate(const UiPrimitives& p);

/// Peak of F0: consumption C0 = (shadow/a)^{1/(a-1)} and u0 = C0^a.
double peak_consumption(const UiPrimitives& p);
double peak_utility(const UiPrimitives& p);

/// max_C { phi(C) - phi'(C) C } over [0, C0], i.e. (1-a) u0.
double eps_linear(const UiPrimitives& p);

struct Offer {
    double C = 0.0;
    double L = 0.0;
    double surplus = 0.0;  // wL - C
};

/// Maximizer of wL - (u + L^b)^{1/a} over L >= 0.
Offer best_offer(const UiPrimitives& p, double u);

/// F0(u) = u - shadow u^{1/a}, F1(u) = u + shadow max_L (wL - (u+L^b)^{1/a}),
/// both on [0, 2 u0].
TechnologyPair build_frontiers(const UiPrimitives& p);

/// Strict concavity of both frontiers and a strictly decreasing F1 - F0 on a
/// uniform grid.
AssumptionReport grid_checks(const UiPrimitives& p, int grid = 200);

struct ScheduleRow {
    double t = 0.0;
    double x = 0.0;
    double X = 0.0;
    double benefit = 0.0;
    double C = 0.0;
    double L = 0.0;
    double theta = 0.0;  // per-period tax wL - C
};

std::vector<ScheduleRow> schedule(const UiPrimitives& p, const Mechanism& m, const std::vector<double>& times);

/// Grid times plus n_extra uniform probes up to 1.5 times the last grid point.
std::vector<ScheduleRow> schedule(const UiPrimitives& p, const Mechanism& m, int n_extra = 20);

void write_schedule_csv(std::ostream& os, const std::vector<ScheduleRow>& rows);

struct WelfareRow {
    double shadow = 0.0;
    double u0 = 0.0;
    double deadline = 0.0;  // Pi of the best deadline
    double T_star = 0.0;
    double optimum = 0.0;   // Pi of the Euler solution
    double ratio = 0.0;
    double eps_linear = 0.0;
    double affine_gap = 0.0;
    bool gap_ok = false;    // optimum - deadline <= affine_gap + 1e-8
    bool corner = false;
};

/// One row per shadow value; all other primitives come from `base`.
std::vector<WelfareRow> welfare_sweep(const UiPrimitives& base, const std::vector<double>& shadows,
                                      const BreakthroughDist& g);

}  // namespace screening::insurance
