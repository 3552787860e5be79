#include "screening/insurance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "screening/deadline.hpp"
#include "screening/errors.hpp"
#include "screening/numerics.hpp"

namespace screening::insurance {

namespace {

double cost(const UiPrimitives& p, double u, double L) { return std::pow(u + std::pow(L, p.b), 1.0 / p.a); }

// d/dL of wL - cost; strictly decreasing in L.
double surplus_slope(const UiPrimitives& p, double u, double L) {
    const double base = u + std::pow(L, p.b);
    return p.w - (p.b / p.a) * std::pow(L, p.b - 1.0) * std::pow(base, 1.0 / p.a - 1.0);
}

}  // namespace

void validate(const UiPrimitives& p) {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (!(p.a > 0.0 && p.a < 1.0)) bad("a must lie in (0, 1)");
    if (!(p.b > 1.0) || !std::isfinite(p.b)) bad("b must exceed 1");
    if (!(p.w > 0.0) || !std::isfinite(p.w)) bad("w must be positive");
    if (!(p.shadow > 0.0) || !std::isfinite(p.shadow)) bad("shadow must be positive");
    if (!(p.r > 0.0) || !std::isfinite(p.r)) bad("r must be positive");
}

double peak_consumption(const UiPrimitives& p) { return std::pow(p.shadow / p.a, 1.0 / (p.a - 1.0)); }

double peak_utility(const UiPrimitives& p) { return std::pow(peak_consumption(p), p.a); }

double eps_linear(const UiPrimitives& p) { return (1.0 - p.a) * peak_utility(p); }

Offer best_offer(const UiPrimitives& p, double u) {
    double hi = 1.0;
    int grow = 0;
    while (surplus_slope(p, u, hi) >= 0.0) {
        hi *= 2.0;
        if (++grow > 200) throw Error(ErrorCode::SolverFailure, "labour maximizer diverges");
    }
    auto objective = [&](double L) { return p.w * L - cost(p, u, L); };
    const auto coarse = numerics::golden_section_max(objective, 0.0, hi, 1e-10);
    // Value comparisons stall near sqrt(eps); finish on the first-order condition.
    const double step = 1e-6 * std::max(1.0, coarse.x);
    double lo = std::max(0.0, coarse.x - step);
    double up = std::min(hi, coarse.x + step);
    if (surplus_slope(p, u, lo) < 0.0) lo = 0.0;
    if (surplus_slope(p, u, up) > 0.0) up = hi;
    const double L =
        lo == 0.0 && surplus_slope(p, u, 0.0) <= 0.0
            ? 0.0
            : numerics::bisect([&](double l) { return surplus_slope(p, u, l); }, lo, up, 1e-15 * std::max(1.0, up))
                  .x;
    const double C = cost(p, u, L);
    return {C, L, p.w * L - C};
}

TechnologyPair build_frontiers(const UiPrimitives& p) {
    validate(p);
    const double hi = 2.0 * peak_utility(p);
    auto f0 = Frontier::parametric([p](double u) { return u - p.shadow * std::pow(u, 1.0 / p.a); },
                                   [p](double u) { return 1.0 - p.shadow / p.a * std::pow(u, 1.0 / p.a - 1.0); }, 0.0,
                                   hi, "insurance F0");
    auto f1 = Frontier::parametric(
        [p](double u) { return u + p.shadow * best_offer(p, u).surplus; },
        [p](double u) {
            const Offer o = best_offer(p, u);
            return 1.0 - p.shadow / p.a * std::pow(u + std::pow(o.L, p.b), 1.0 / p.a - 1.0);
        },
        0.0, hi, "insurance F1");
    return make_technology(std::move(f0), std::move(f1), p.r);
}

AssumptionReport grid_checks(const UiPrimitives& p, int grid) {
    const TechnologyPair pair = build_frontiers(p);
    const double hi = pair.f0.domain_hi();
    const double h = hi / grid;
    AssumptionReport rep;
    auto slope_drop = [&](const Frontier& f, const std::string& name) {
        AssumptionCheck c{name, true, std::nullopt, ""};
        for (int i = 1; i <= grid; ++i) {
            const double u = h * i;
            if (!(f.slope(u) < f.slope(u - h))) {
                c = {name, false, u, "slope does not fall"};
                break;
            }
        }
        rep.checks.push_back(c);
    };
    slope_drop(pair.f0, "f0 strictly concave");
    slope_drop(pair.f1, "f1 strictly concave");
    AssumptionCheck gap{"gap strictly decreasing", true, std::nullopt, ""};
    double prev = pair.f1.at(0.0) - pair.f0.at(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double u = h * i;
        const double cur = pair.f1.at(u) - pair.f0.at(u);
        if (!(cur < prev) || !(cur > 0.0)) {
            gap = {gap.name, false, u, "F1 - F0 not positive and falling"};
            break;
        }
        prev = cur;
    }
    rep.checks.push_back(gap);
    rep.checks.push_back({"u_star = 0", pair.u_star == 0.0,
                          pair.u_star == 0.0 ? std::nullopt : std::optional<double>(pair.u_star), ""});
    return rep;
}

std::vector<ScheduleRow> schedule(const UiPrimitives& p, const Mechanism& m, const std::vector<double>& times) {
    validate(p);
    std::vector<ScheduleRow> rows;
    rows.reserve(times.size());
    for (const double t : times) {
        ScheduleRow row;
        row.t = t;
        row.x = m.flow(t);
        row.X = m.reward(t);
        row.benefit = std::pow(row.x, 1.0 / p.a);
        const Offer o = best_offer(p, row.X);
        row.C = o.C;
        row.L = o.L;
        row.theta = o.surplus;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ScheduleRow> schedule(const UiPrimitives& p, const Mechanism& m, int n_extra) {
    std::vector<double> times(m.grid().begin(), m.grid().end());
    const double last = std::max(times.back(), 1.0);
    for (int i = 0; i <= n_extra && n_extra > 0; ++i) times.push_back(1.5 * last * i / n_extra);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return schedule(p, m, times);
}

void write_schedule_csv(std::ostream& os, const std::vector<ScheduleRow>& rows) {
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "t,x,X,b,C,L,theta\n";
    for (const auto& r : rows) {
        os << r.t << ',' << r.x << ',' << r.X << ',' << r.benefit << ',' << r.C << ',' << r.L << ',' << r.theta
           << '\n';
    }
    os.precision(old);
}

std::vector<WelfareRow> welfare_sweep(const UiPrimitives& base, const std::vector<double>& shadows,
                                      const BreakthroughDist& g) {
    for (std::size_t i = 0; i < shadows.size(); ++i) {
        if (!(shadows[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "shadow values must be positive");
        if (i > 0 && !(shadows[i] < shadows[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "shadow values must be decreasing");
        }
    }
    std::vector<WelfareRow> rows;
    for (const double s : shadows) {
        UiPrimitives p = base;
        p.shadow = s;
        const TechnologyPair pair = build_frontiers(p);
        WelfareRow row;
        row.shadow = s;
        row.u0 = pair.u0;
        const auto d = optimize_deadline(pair, g);
        row.deadline = d.pi;
        row.T_star = d.T_star;
        const EulerSolver solver(pair);
        const auto e = solver.solve(g);
        row.optimum = e.payoff;
        row.corner = e.corner;
        row.ratio = row.deadline / row.optimum;
        row.eps_linear = eps_linear(p);
        row.affine_gap = affine_gap(pair.f0, pair.u_star, pair.u0);
        row.gap_ok = row.optimum - row.deadline <= row.affine_gap + 1e-8;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace screening::insurance
