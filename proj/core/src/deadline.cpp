#include "screening/deadline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screening/errors.hpp"
#include "screening/numerics.hpp"

namespace screening {

DeadlineSpec DeadlineSpec::of(const TechnologyPair& pair, double T) {
    if (!(T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "deadline must be >= 0");
    return DeadlineSpec{T, pair.u0, pair.u_star, pair.r};
}

double reward_at(const DeadlineSpec& d, double t) {
    if (d.is_infinite()) return d.u0;
    if (t >= d.T) return d.u_star;
    const double e = std::exp(-d.r * (d.T - t));
    return -std::expm1(-d.r * (d.T - t)) * d.u0 + e * d.u_star;
}

double t_underline(const TechnologyPair& pair) {
    if (!(pair.u1 < pair.u0)) throw Error(ErrorCode::InvalidArgument, "u1 must be below u0");
    if (pair.u1 <= pair.u_star) return 0.0;
    return -std::log((pair.u0 - pair.u1) / (pair.u0 - pair.u_star)) / pair.r;
}

double affine_slope(const TechnologyPair& pair) {
    return (pair.f0.at(pair.u0) - pair.f0.at(pair.u_star)) / (pair.u0 - pair.u_star);
}

double deadline_payoff(const TechnologyPair& pair, double T, const BreakthroughDist& g) {
    const DeadlineSpec d = DeadlineSpec::of(pair, T);
    const double r = pair.r;
    const double f_top = pair.f0.at(pair.u0);
    const double f_low = pair.f0.at(pair.u_star);
    double total = 0.0;
    for (const Atom& a : g.atoms()) {
        const double cut = std::min(a.t, T);
        const double e_cut = std::exp(-r * cut);
        const double pre = -std::expm1(-r * cut) * f_top + e_cut * -std::expm1(-r * (a.t - cut)) * f_low;
        const double post = std::exp(-r * a.t) * pair.f1.at(reward_at(d, a.t));
        total += a.p * (pre + post);
    }
    return total;
}

DeadlineDerivs pi_and_derivs(const TechnologyPair& pair, const DeadlineSpec& d, const BreakthroughDist& g) {
    DeadlineDerivs out;
    out.alpha = affine_slope(pair);
    out.pi = deadline_payoff(pair, d.T, g);

    double plus = 0.0;
    double minus = 0.0;
    double mass_le = 0.0;
    double mass_lt = 0.0;
    for (const Atom& a : g.atoms()) {
        if (a.t > d.T) break;
        const Derivs dv = pair.f1.eval_derivs(reward_at(d, a.t));
        plus += a.p * dv.d_plus.to_double();
        mass_le += a.p;
        if (a.t < d.T) {
            minus += a.p * dv.d_minus.to_double();
            mass_lt += a.p;
        }
    }
    // Survival summed from the right avoids 1 - G cancellation.
    double surv_le = 0.0;
    double surv_lt = 0.0;
    for (const Atom& a : g.atoms()) {
        if (a.t > d.T) surv_le += a.p;
        if (a.t >= d.T) surv_lt += a.p;
    }
    out.bracket_plus = surv_le * out.alpha + plus;
    out.bracket_minus = surv_lt * out.alpha + minus;
    const double scale = d.is_infinite() ? 0.0 : std::exp(-d.r * d.T) * (d.u0 - d.u_star);
    out.pi_plus = scale * out.bracket_plus;
    out.pi_minus = scale * out.bracket_minus;
    return out;
}

FocReport foc_report(const TechnologyPair& pair, double T, const BreakthroughDist& g, double tol) {
    const DeadlineDerivs dd = pi_and_derivs(pair, DeadlineSpec::of(pair, T), g);
    FocReport f;
    f.alpha = dd.alpha;
    f.pi_plus = dd.pi_plus;
    f.pi_minus = dd.pi_minus;
    f.bracket_plus = dd.bracket_plus;
    f.bracket_minus = dd.bracket_minus;
    f.satisfied = dd.bracket_plus <= tol && dd.bracket_minus >= -tol;
    return f;
}

namespace {

double bracket_plus(const TechnologyPair& pair, double T, const BreakthroughDist& g) {
    return pi_and_derivs(pair, DeadlineSpec::of(pair, T), g).bracket_plus;
}

}  // namespace

DeadlineOptimum optimize_deadline(const TechnologyPair& pair, const BreakthroughDist& g,
                                  const DeadlineOptions& opt) {
    DeadlineOptimum out;
    const double t_lo = t_underline(pair);
    out.T_underline = t_lo;
    out.f0_affine = affine_gap(pair.f0, pair.u_star, pair.u0) <= opt.affine_tol;

    auto down = [&](double T) { return bracket_plus(pair, T, g) <= 0.0; };
    // A crossing at a jump lands on the atom itself, where pi_minus still sees it.
    auto root_in = [&](double a, double b) {
        const double tol = opt.t_tol * std::max(1.0, b);
        const auto [left, right] = numerics::bisect_predicate(down, a, b, tol);
        for (const Atom& at : g.atoms()) {
            if (at.t > left && at.t <= right && down(at.t)) return at.t;
        }
        return right;
    };

    // Grow T_hi past the last atom until the bracket is negative.
    const double t_last = g.atoms().back().t;
    double span = 1.0;
    double t_hi = std::max(t_lo, t_last) + span;
    int grow = 0;
    while (!down(t_hi) && grow < 60) {
        span *= 2.0;
        t_hi = std::max(t_lo, t_last) + span;
        ++grow;
    }
    const bool bracketed = down(t_hi);

    if (out.f0_affine) {
        if (down(t_lo)) {
            out.T_star = t_lo;
        } else if (bracketed) {
            out.T_star = root_in(t_lo, t_hi);
        } else {
            out.T_star = t_hi;
            out.note = "pi_plus bracket stayed positive up to T = " + std::to_string(t_hi);
        }
        out.candidates.push_back(out.T_star);
    } else {
        out.note = "f0 is not affine on [u_star, u0]; result is the best deadline mechanism only";
        std::vector<double> grid;
        const int n = std::max(opt.scan_points, 2);
        for (int i = 0; i <= n; ++i) grid.push_back(t_lo + (t_hi - t_lo) * i / n);
        for (const Atom& a : g.atoms()) {
            if (a.t > t_lo && a.t < t_hi) grid.push_back(a.t);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        if (down(t_lo)) out.candidates.push_back(t_lo);
        bool prev = down(grid.front());
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const bool cur = down(grid[i]);
            if (!prev && cur) out.candidates.push_back(root_in(grid[i - 1], grid[i]));
            prev = cur;
        }
        if (out.candidates.empty()) out.candidates.push_back(t_hi);
        double best = -std::numeric_limits<double>::infinity();
        for (double T : out.candidates) {
            const double v = deadline_payoff(pair, T, g);
            if (v > best) {
                best = v;
                out.T_star = T;
            }
        }
    }

    out.pi = deadline_payoff(pair, out.T_star, g);
    out.foc = foc_report(pair, out.T_star, g, opt.foc_tol);
    const double pi_inf = deadline_payoff(pair, kNoDeadline, g);
    out.infinite_anomaly = pi_inf > out.pi + opt.foc_tol;
    if (out.infinite_anomaly) {
        if (!out.note.empty()) out.note += "; ";
        out.note += "T = inf beats every finite candidate";
    }
    return out;
}

}  // namespace screening
