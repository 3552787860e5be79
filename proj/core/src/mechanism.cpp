#include "screening/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "screening/errors.hpp"

namespace screening {

namespace {

constexpr double kIcTol = 1e-12;

// 1 - e^{-a}
double one_minus_exp(double a) { return -std::expm1(-a); }

}  // namespace

Mechanism::Mechanism(std::vector<double> grid, std::vector<double> levels, double r)
    : grid_(std::move(grid)), levels_(std::move(levels)), r_(r) {
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw Error(ErrorCode::InvalidArgument, "discount rate must be finite and > 0");
    if (grid_.empty() || grid_.size() != levels_.size()) {
        throw Error(ErrorCode::InvalidArgument, "grid and levels must be nonempty and of equal length");
    }
    if (grid_.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "grid must start at 0");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i])) throw Error(ErrorCode::InvalidArgument, "grid times must be finite");
        if (i > 0 && !(grid_[i] > grid_[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
        if (!std::isfinite(levels_[i]) || levels_[i] < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "levels must be finite and >= 0");
        }
    }
    const std::size_t n = grid_.size();
    value_at_grid_.assign(n, levels_.back());
    for (std::size_t i = n - 1; i-- > 0;) {
        const double w = one_minus_exp(r_ * (grid_[i + 1] - grid_[i]));
        value_at_grid_[i] = w * levels_[i] + (1.0 - w) * value_at_grid_[i + 1];
    }
}

Mechanism Mechanism::with_reward(std::vector<CellReward> reward) const {
    if (reward.size() != grid_.size()) throw Error(ErrorCode::InvalidArgument, "reward must have one entry per cell");
    for (const auto& c : reward) {
        if (!std::isfinite(c.level) || !std::isfinite(c.growth)) {
            throw Error(ErrorCode::InvalidArgument, "reward coefficients must be finite");
        }
    }
    Mechanism m = *this;
    m.reward_ = std::move(reward);
    return m;
}

Mechanism Mechanism::with_constant_reward(std::span<const double> reward) const {
    std::vector<CellReward> cells;
    cells.reserve(reward.size());
    for (double v : reward) cells.push_back({v, 0.0});
    return with_reward(std::move(cells));
}

Mechanism Mechanism::with_materialized_reward() const {
    const std::size_t n = grid_.size();
    std::vector<CellReward> cells(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double decay = std::exp(-r_ * (grid_[i + 1] - grid_[i]));
        cells[i] = {levels_[i], (value_at_grid_[i + 1] - levels_[i]) * decay};
    }
    cells[n - 1] = {levels_[n - 1], 0.0};
    return with_reward(std::move(cells));
}

std::size_t Mechanism::cell(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time must be >= 0");
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

double Mechanism::continuation_value(double t) const {
    if (t == std::numeric_limits<double>::infinity()) return levels_.back();
    const std::size_t i = cell(t);
    if (i + 1 == grid_.size()) return levels_[i];
    const double w = one_minus_exp(r_ * (grid_[i + 1] - t));
    return w * levels_[i] + (1.0 - w) * value_at_grid_[i + 1];
}

double Mechanism::reward(double t) const {
    if (reward_.empty()) return continuation_value(t);
    const std::size_t i = cell(t);
    const auto& c = reward_[i];
    if (c.growth == 0.0) return c.level;
    return c.level + c.growth * std::exp(r_ * (t - grid_[i]));
}

Mechanism Mechanism::capped(double cap) const {
    std::vector<double> lv = levels_;
    for (double& v : lv) v = std::min(v, cap);
    Mechanism m(grid_, std::move(lv), r_);
    m.reward_ = reward_;
    return m;
}

Mechanism to_mechanism(const DeadlineSpec& d) {
    if (d.is_infinite()) return Mechanism::constant(d.u0, d.r);
    if (!(d.T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "deadline must be >= 0");
    if (d.T == 0.0) return Mechanism::constant(d.u_star, d.r);
    return Mechanism({0.0, d.T}, {d.u0, d.u_star}, d.r);
}

PayoffBreakdown payoff(const Mechanism& m, const TechnologyPair& pair, const BreakthroughDist& g) {
    const auto grid = m.grid();
    const auto levels = m.levels();
    const double r = m.r();

    PayoffBreakdown out;
    double total = 0.0;
    double pre_sum = 0.0;
    double post_sum = 0.0;

    for (const Atom& a : g.atoms()) {
        PayoffRow row{a.t, a.p, ExtReal(0.0), ExtReal(0.0)};

        bool pre_off = false;
        double pre = 0.0;
        for (std::size_t j = 0; j < grid.size() && grid[j] < a.t; ++j) {
            const double end = (j + 1 < grid.size()) ? std::min(grid[j + 1], a.t) : a.t;
            const double weight = std::exp(-r * grid[j]) * one_minus_exp(r * (end - grid[j]));
            const ExtReal v = pair.f0(levels[j]);
            if (!v.is_finite()) {
                pre_off = true;
                break;
            }
            pre += weight * v.value();
        }
        row.pre = pre_off ? NEG_INF : ExtReal(pre);

        const ExtReal post = pair.f1(m.reward(a.t));
        row.post = post.is_finite() ? ExtReal(std::exp(-r * a.t) * post.value()) : NEG_INF;

        if (pre_off || !post.is_finite()) {
            out.off_domain = true;
        } else {
            pre_sum += a.p * pre;
            post_sum += a.p * row.post.value();
            total += a.p * (pre + row.post.value());
        }
        out.rows.push_back(row);
    }

    if (out.off_domain) {
        out.total = NEG_INF;
        out.pre_disclosure = NEG_INF;
        out.post_disclosure = NEG_INF;
    } else {
        out.total = total;
        out.pre_disclosure = pre_sum;
        out.post_disclosure = post_sum;
    }
    return out;
}

IcReport ic_check(const Mechanism& m) {
    const Mechanism em = m.has_explicit_reward() ? m : m.with_materialized_reward();
    const Mechanism x0 = Mechanism(std::vector<double>(m.grid().begin(), m.grid().end()),
                                   std::vector<double>(m.levels().begin(), m.levels().end()), m.r())
                             .with_materialized_reward();
    const auto grid = em.grid();
    const auto levels = em.levels();
    const auto rew = em.explicit_reward();
    const auto own = x0.explicit_reward();
    const double r = em.r();
    const std::size_t n = grid.size();

    struct Failure {
        double t;
        IcClause clause;
        std::string what;
    };
    std::optional<Failure> first;
    auto fail = [&](double t, IcClause clause, std::string what) {
        const bool earlier = !first || t < first->t ||
                             (t == first->t && clause == IcClause::NonDisclosure && first->clause == IcClause::Delay);
        if (earlier) first = Failure{t, clause, std::move(what)};
    };

    IcReport rep;
    double prev_right = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Within cell i: h(t) = e^{-rt} (c - x) + (g - g0) e^{-r s_i}.
        const double s = grid[i];
        const double slope_part = rew[i].level - levels[i];
        const double shift = (rew[i].growth - own[i].growth) * std::exp(-r * s);
        const double h_left = std::exp(-r * s) * slope_part + shift;
        const bool last = i + 1 == n;
        const double s_next = last ? std::numeric_limits<double>::infinity() : grid[i + 1];
        const double h_right = last ? shift : std::exp(-r * s_next) * slope_part + shift;

        rep.h_values.emplace_back(s, h_left);
        if (!last) rep.h_values.emplace_back(s_next, h_right);

        if (h_left < -kIcTol) {
            fail(s, IcClause::NonDisclosure, "h(" + std::to_string(s) + ") = " + std::to_string(h_left) + " < 0");
        } else if (h_right < -kIcTol) {
            // h is monotone in the cell; locate the zero crossing.
            double t_cross = s_next;
            if (slope_part > 0.0 && shift < 0.0) t_cross = std::log(slope_part / -shift) / r;
            t_cross = std::clamp(t_cross, s, s_next);
            fail(t_cross, IcClause::NonDisclosure,
                 "h turns negative at t = " + std::to_string(t_cross));
        }
        if (i > 0 && h_left > prev_right + kIcTol) {
            fail(s, IcClause::Delay, "h jumps up at t = " + std::to_string(s));
        }
        if (slope_part < -kIcTol) {
            fail(s, IcClause::Delay, "h increasing on cell starting at t = " + std::to_string(s));
        }
        prev_right = h_right;
    }

    if (first) {
        rep.ic = false;
        rep.clause = first->clause;
        rep.violation_time = first->t;
        rep.violation = std::string(first->clause == IcClause::Delay ? "delay: " : "non-disclosure: ") + first->what;
    }
    return rep;
}

FrontLoad front_load(const Mechanism& m, const TechnologyPair& pair) {
    const double x0 = m.continuation_value(0.0);
    const double u0 = pair.u0;
    const double us = pair.u_star;
    const double tol = 1e-12 * std::max(1.0, std::abs(u0));
    if (x0 > u0 + tol) throw Error(ErrorCode::InvalidArgument, "X0 exceeds u0; cap levels at u0 first");

    FrontLoad out;
    out.f0_affine = pair.f0.is_affine_on(us, u0);
    out.deadline = DeadlineSpec{0.0, u0, us, pair.r};
    const double target = std::max(x0, us);
    if (target >= u0 - tol) {
        out.deadline.T = kNoDeadline;
    } else if (target > us) {
        out.deadline.T = -std::log((u0 - target) / (u0 - us)) / pair.r;
    }
    return out;
}

std::vector<MechanismSample> sample(const Mechanism& m, std::span<const double> extra_times) {
    std::vector<double> ts(m.grid().begin(), m.grid().end());
    for (double t : extra_times) {
        if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::InvalidArgument, "sample times must be finite and >= 0");
        ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<MechanismSample> rows;
    rows.reserve(ts.size());
    for (double t : ts) rows.push_back({t, m.flow(t), m.continuation_value(t), m.reward(t)});
    return rows;
}

void write_csv(std::ostream& os, std::span<const MechanismSample> rows) {
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "t,x,X,X1\n";
    for (const auto& s : rows) os << s.t << ',' << s.x << ',' << s.X << ',' << s.X1 << '\n';
    os.precision(old);
}

}  // namespace screening
