#include "screening/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "screening/errors.hpp"
#include "screening/numerics.hpp"

namespace screening {

namespace {

constexpr double kSnapTol = 1e-12;
constexpr double kSlopeTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kSnapTol * std::max(1.0, std::abs(b)); }

double chord_slope(const Breakpoint& a, const Breakpoint& b) { return (b.v - a.v) / (b.u - a.u); }

// Superdifferentials [d_plus, d_minus] of two frontiers intersect.
bool share_supergradient(const Derivs& a, const Derivs& b) {
    if (a.value.is_neg_inf() || b.value.is_neg_inf()) return false;
    const ExtReal lo = std::max(a.d_plus, b.d_plus, [](const ExtReal& x, const ExtReal& y) { return x < y; });
    const ExtReal hi = std::min(a.d_minus, b.d_minus, [](const ExtReal& x, const ExtReal& y) { return x < y; });
    if (lo.is_finite() && hi.is_finite()) return lo.value() <= hi.value() + kSlopeTol;
    return lo <= hi;
}

}  // namespace

Frontier Frontier::piecewise(std::vector<Breakpoint> points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
            throw Error(ErrorCode::InvalidFrontier, "breakpoints must be finite");
        }
    }
    std::sort(points.begin(), points.end(), [](const Breakpoint& a, const Breakpoint& b) {
        return a.u < b.u || (a.u == b.u && a.v > b.v);
    });
    // Duplicate u: the first (highest v) survives.
    points.erase(std::unique(points.begin(), points.end(),
                             [](const Breakpoint& a, const Breakpoint& b) { return a.u == b.u; }),
                 points.end());
    if (points.size() < 2) {
        throw Error(ErrorCode::InvalidFrontier, "need at least two distinct agent utilities");
    }

    // Upper hull (monotone chain); collinear points are dropped so that chord
    // slopes are strictly decreasing.
    std::vector<Breakpoint> hull;
    for (const auto& p : points) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }

    Frontier f;
    f.lo_ = hull.front().u;
    f.hi_ = hull.back().u;
    f.breakpoints_ = std::move(hull);
    f.label_ = "piecewise";
    return f;
}

Frontier Frontier::parametric(Fn value, Fn derivative, double lo, double hi, std::string label) {
    if (!value) throw Error(ErrorCode::InvalidFrontier, "parametric frontier needs an evaluator");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidFrontier, "parametric frontier needs a finite domain lo < hi");
    }
    Frontier f;
    f.value_ = std::move(value);
    f.derivative_ = std::move(derivative);
    f.lo_ = lo;
    f.hi_ = hi;
    f.label_ = std::move(label);
    return f;
}

Frontier Frontier::quadratic(double peak_u, double peak_v, double curvature, double lo, double hi) {
    if (!(curvature > 0.0)) throw Error(ErrorCode::InvalidFrontier, "quadratic curvature must be > 0");
    std::ostringstream label;
    label << "quadratic(" << peak_u << "," << peak_v << "," << curvature << ")";
    return parametric([=](double u) { return peak_v - curvature * (u - peak_u) * (u - peak_u); },
                      [=](double u) { return -2.0 * curvature * (u - peak_u); }, lo, hi, label.str());
}

Derivs Frontier::eval_derivs(double u) const {
    if (std::isnan(u) || u < lo_ - kSnapTol * std::max(1.0, std::abs(lo_)) ||
        u > hi_ + kSnapTol * std::max(1.0, std::abs(hi_))) {
        return {NEG_INF, ExtReal::undefined(), ExtReal::undefined()};
    }
    return is_piecewise() ? eval_piecewise(u) : eval_parametric(std::clamp(u, lo_, hi_));
}

Derivs Frontier::eval_piecewise(double u) const {
    const auto& bp = breakpoints_;
    const std::size_t n = bp.size();
    auto it = std::lower_bound(bp.begin(), bp.end(), u,
                               [](const Breakpoint& b, double x) { return b.u < x; });
    std::size_t hit = n;
    if (it != bp.end() && near(u, it->u)) hit = static_cast<std::size_t>(it - bp.begin());
    if (hit == n && it != bp.begin() && near(u, std::prev(it)->u)) {
        hit = static_cast<std::size_t>(it - bp.begin()) - 1;
    }
    if (hit != n) {
        const ExtReal right = hit + 1 < n ? ExtReal(chord_slope(bp[hit], bp[hit + 1])) : NEG_INF;
        const ExtReal left = hit > 0 ? ExtReal(chord_slope(bp[hit - 1], bp[hit])) : POS_INF;
        return {bp[hit].v, right, left};
    }
    const std::size_t j = static_cast<std::size_t>(it - bp.begin());  // bp[j-1].u < u < bp[j].u
    const double s = chord_slope(bp[j - 1], bp[j]);
    return {bp[j - 1].v + s * (u - bp[j - 1].u), s, s};
}

Derivs Frontier::eval_parametric(double u) const {
    const double v = value_(u);
    auto deriv = [&](double x, int side) {
        if (derivative_) return derivative_(x);
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        const double a = side < 0 ? x - h : std::max(lo_, x - h);
        const double b = side > 0 ? x + h : std::min(hi_, x + h);
        return (value_(b) - value_(a)) / (b - a);
    };
    if (u <= lo_) return {v, deriv(lo_, +1), POS_INF};
    if (u >= hi_) return {v, NEG_INF, deriv(hi_, -1)};
    const double d = deriv(u, 0);
    return {v, d, d};
}

double Frontier::slope(double u) const {
    const Derivs d = eval_derivs(u);
    if (d.value.is_neg_inf()) {
        throw Error(ErrorCode::SentinelArithmetic, "slope requested off the frontier domain");
    }
    return d.d_plus.is_finite() ? d.d_plus.value() : d.d_minus.value();
}

double Frontier::peak() const {
    if (is_piecewise()) {
        const auto best = std::max_element(breakpoints_.begin(), breakpoints_.end(),
                                           [](const Breakpoint& a, const Breakpoint& b) { return a.v < b.v; });
        const auto ties = std::count_if(breakpoints_.begin(), breakpoints_.end(),
                                        [&](const Breakpoint& b) { return b.v == best->v; });
        if (ties > 1) throw Error(ErrorCode::NonUniquePeak, "frontier has a flat top");
        return best->u;
    }
    if (slope(lo_) <= 0.0) return lo_;
    if (slope(hi_) >= 0.0) return hi_;
    return numerics::bisect([this](double u) { return slope(u); }, lo_, hi_, 1e-15).x;
}

bool Frontier::is_affine_on(double a, double b, double tol) const {
    if (!(a < b)) return true;
    if (is_piecewise()) {
        for (const auto& p : breakpoints_) {
            if (p.u > a && p.u < b && !near(p.u, a) && !near(p.u, b)) return false;
        }
        return true;
    }
    constexpr int n = 64;
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) {
        const double u = a + i * h;
        const double second = at(u - h) - 2.0 * at(u) + at(u + h);
        if (std::abs(second) > tol) return false;
    }
    return true;
}

TechnologyPair make_technology(Frontier f0, Frontier f1, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "discount rate must be > 0");
    TechnologyPair pair{std::move(f0), std::move(f1), 0.0, 0.0, 0.0, r};
    pair.u0 = pair.f0.peak();
    pair.u1 = pair.f1.peak();
    pair.u_star = u_star(pair.f0, pair.f1);
    return pair;
}

double u_star(const Frontier& f0, const Frontier& f1) {
    const double u0 = f0.peak();
    if (u0 <= 0.0) return 0.0;

    if (f0.is_piecewise() && f1.is_piecewise()) {
        std::vector<double> cand{0.0};
        for (const auto* f : {&f0, &f1}) {
            for (const auto& b : f->breakpoints()) {
                if (b.u > 0.0 && b.u < u0 && !near(b.u, u0)) cand.push_back(b.u);
            }
        }
        cand.push_back(u0);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end(), near), cand.end());
        // Right to left: the open gap above each candidate (parallel segments)
        // and then the candidate itself. u0 is excluded.
        for (std::size_t i = cand.size() - 1; i-- > 0;) {
            const double mid = 0.5 * (cand[i] + cand[i + 1]);
            if (share_supergradient(f0.eval_derivs(mid), f1.eval_derivs(mid))) {
                return i + 1 == cand.size() - 1 ? u0 : cand[i + 1];
            }
            if (share_supergradient(f0.eval_derivs(cand[i]), f1.eval_derivs(cand[i]))) return cand[i];
        }
        return 0.0;
    }

    // Smooth route: rightmost sign change of d+f0 - d+f1 from <= 0 to > 0.
    auto gap = [&](double u) { return f0.slope(u) - f1.slope(u); };
    constexpr int n = 2000;
    const double lo = std::max(0.0, f0.domain_lo());
    const double h = (u0 - lo) / n;
    for (int i = n - 1; i >= 0; --i) {
        const double a = lo + i * h;
        if (gap(a) <= 0.0) {
            const double b = lo + (i + 1) * h;
            return numerics::bisect(gap, a, b, 4e-16 * std::max(1.0, u0)).x;
        }
    }
    return 0.0;
}

double affine_gap(const Frontier& f0, double u_star, double u0) {
    if (!(u0 > u_star)) return 0.0;
    const double v_lo = f0.at(u_star);
    const double slope = (f0.at(u0) - v_lo) / (u0 - u_star);
    auto excess = [&](double u) { return f0.at(u) - (v_lo + slope * (u - u_star)); };

    double best = 0.0;
    if (f0.is_piecewise()) {
        for (const auto& b : f0.breakpoints()) {
            if (b.u > u_star && b.u < u0) best = std::max(best, excess(b.u));
        }
        return best;
    }
    const int n = static_cast<int>(std::ceil((u0 - u_star) / 1e-4));
    const double h = (u0 - u_star) / n;
    int arg = 0;
    for (int i = 1; i < n; ++i) {
        const double e = excess(u_star + i * h);
        if (e > best) {
            best = e;
            arg = i;
        }
    }
    if (arg == 0) return best;
    const auto refined = numerics::golden_section_max(excess, u_star + (arg - 1) * h,
                                                      u_star + (arg + 1) * h, 1e-12);
    return std::max(best, refined.fx);
}

bool AssumptionReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

AssumptionCheck concavity_check(const Frontier& f, const std::string& name) {
    AssumptionCheck c{name, true, std::nullopt, ""};
    if (f.is_piecewise()) return c;  // concave by construction
    constexpr int n = 400;
    const double h = (f.domain_hi() - f.domain_lo()) / n;
    for (int i = 1; i < n; ++i) {
        const double u = f.domain_lo() + i * h;
        const double second = f.at(u - h) - 2.0 * f.at(u) + f.at(u + h);
        if (second > 1e-12 * std::max(1.0, std::abs(f.at(u)))) {
            c.pass = false;
            c.witness = u;
            c.detail = "positive second difference";
            return c;
        }
    }
    return c;
}

AssumptionCheck peak_check(const Frontier& f, const std::string& name) {
    AssumptionCheck c{name, true, std::nullopt, ""};
    try {
        (void)f.peak();
    } catch (const Error& e) {
        c.pass = false;
        c.detail = e.what();
    }
    return c;
}

}  // namespace

AssumptionReport validate_model(const TechnologyPair& pair) {
    AssumptionReport report;
    const auto& f0 = pair.f0;
    const auto& f1 = pair.f1;

    report.checks.push_back(concavity_check(f0, "f0 concave"));
    report.checks.push_back(concavity_check(f1, "f1 concave"));
    report.checks.push_back(peak_check(f0, "f0 unique peak"));
    report.checks.push_back(peak_check(f1, "f1 unique peak"));

    {
        AssumptionCheck c{"u1 < u0", pair.u1 < pair.u0, std::nullopt, ""};
        if (!c.pass) {
            c.witness = pair.u1;
            c.detail = "no conflict of interest";
        }
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c{"f1 >= f0", true, std::nullopt, ""};
        const double lo = std::max(f0.domain_lo(), f1.domain_lo());
        const double hi = std::min(f0.domain_hi(), f1.domain_hi());
        std::vector<double> probes;
        constexpr int n = 400;
        for (int i = 0; i <= n; ++i) probes.push_back(lo + (hi - lo) * i / n);
        for (const auto* f : {&f0, &f1}) {
            if (!f->is_piecewise()) continue;
            for (const auto& b : f->breakpoints()) {
                if (b.u >= lo && b.u <= hi) probes.push_back(b.u);
            }
        }
        std::sort(probes.begin(), probes.end());
        for (double u : probes) {
            const ExtReal v0 = f0(u);
            const ExtReal v1 = f1(u);
            if (v0.is_neg_inf()) continue;
            if (v1.is_neg_inf() || v1.value() < v0.value() - 1e-12) {
                c.pass = false;
                c.witness = u;
                c.detail = "new frontier below old frontier";
                break;
            }
        }
        report.checks.push_back(c);
    }

    {
        const bool ok = pair.u_star >= 0.0 && pair.u_star <= pair.u1 + 1e-12;
        AssumptionCheck c{"0 <= u_star <= u1", ok, std::nullopt, ""};
        if (!ok) c.witness = pair.u_star;
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c{"u_star strict local max", true, std::nullopt, ""};
        auto gap = [&](double u) -> std::optional<double> {
            const ExtReal a = f1(u);
            const ExtReal b = f0(u);
            if (!a.is_finite() || !b.is_finite()) return std::nullopt;
            return a.value() - b.value();
        };
        constexpr double h = 1e-4;
        const auto at = gap(pair.u_star);
        const auto right = gap(pair.u_star + h);
        if (!at || !right || !(*right < *at)) {
            c.pass = false;
            c.witness = pair.u_star;
            c.detail = "F1-F0 not strictly decreasing right of u_star (suspected saddle or flat maximum)";
        } else if (pair.u_star >= h) {
            const auto left = gap(pair.u_star - h);
            if (!left || *left > *at + 1e-15) {
                c.pass = false;
                c.witness = pair.u_star;
                c.detail = "F1-F0 decreasing left of u_star (suspected saddle)";
            }
        }
        report.checks.push_back(c);
    }

    {
        AssumptionCheck c{"f0 finite on (0,u0]", true, std::nullopt, ""};
        constexpr int n = 200;
        for (int i = 1; i <= n; ++i) {
            const double u = pair.u0 * i / n;
            if (!f0(u).is_finite()) {
                c.pass = false;
                c.witness = u;
                break;
            }
        }
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace screening
