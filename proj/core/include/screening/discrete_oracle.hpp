#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "screening/errors.hpp"

namespace screening {
struct TechnologyPair;
}

/// Discrete-time brute force: periods 0..H-1, both flows constant from H-1 on.
/// Templated on the scalar so the same code runs on doubles and on exact
/// rationals.
namespace screening::discrete {

template <class S>
S default_tol() {
    if constexpr (std::is_floating_point_v<S>) {
        return S(1e-12);
    } else {
        return S(0);
    }
}

template <class S>
using Fn = std::function<S(const S&)>;

template <class S>
struct Pair {
    Fn<S> f0;
    Fn<S> f1;
    S u0;
    S u1;
    S u_star;
};

/// Linear interpolation through `pts` (sorted by u). Throws off the domain.
template <class S>
Fn<S> piecewise_linear(std::vector<std::pair<S, S>> pts) {
    if (pts.size() < 2) throw Error(ErrorCode::InvalidFrontier, "need at least two breakpoints");
    return [pts = std::move(pts)](const S& u) -> S {
        if (u < pts.front().first || u > pts.back().first) {
            throw Error(ErrorCode::InvalidArgument, "utility outside the frontier domain");
        }
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (u <= pts[i].first) {
                const auto& [ua, va] = pts[i - 1];
                const auto& [ub, vb] = pts[i];
                return S(va + (vb - va) * (u - ua) / (ub - ua));
            }
        }
        return pts.back().second;
    };
}

Pair<double> from_technology(const TechnologyPair& pair);

template <class S>
struct Mech {
    S beta;
    std::vector<S> x;
    std::vector<S> X1;

    int horizon() const { return static_cast<int>(x.size()); }
};

/// X0_s = (1 - beta) x_s + beta X0_{s+1}, with X0 = x on the constant tail.
template <class S>
std::vector<S> continuation(const Mech<S>& m) {
    const int h = m.horizon();
    std::vector<S> out(h);
    out[h - 1] = m.x[h - 1];
    for (int s = h - 2; s >= 0; --s) out[s] = S((1 - m.beta) * m.x[s] + m.beta * out[s + 1]);
    return out;
}

template <class S>
Mech<S> materialize(S beta, std::vector<S> x) {
    Mech<S> m{beta, std::move(x), {}};
    m.X1 = continuation(m);
    return m;
}

/// Delay slack at s: X1_s - (1-beta) x_s - beta X1_{s+1}; on the tail X1 - x.
template <class S>
S delay_slack(const Mech<S>& m, int s) {
    const int h = m.horizon();
    if (s >= h - 1) return S(m.X1[h - 1] - m.x[h - 1]);
    return S(m.X1[s] - (1 - m.beta) * m.x[s] - m.beta * m.X1[s + 1]);
}

struct IcResult {
    bool ok = true;
    bool delay_ok = true;
    bool nondisclosure_ok = true;
    std::vector<int> slack_periods;
};

template <class S>
IcResult ic_discrete(const Mech<S>& m, const S& tol = default_tol<S>()) {
    IcResult r;
    const std::vector<S> x0 = continuation(m);
    for (int s = 0; s < m.horizon(); ++s) {
        const S slack = delay_slack(m, s);
        if (slack < -tol) r.delay_ok = false;
        if (slack > tol) r.slack_periods.push_back(s);
        if (m.X1[s] - x0[s] < -tol) r.nondisclosure_ok = false;
    }
    r.ok = r.delay_ok && r.nondisclosure_ok;
    return r;
}

/// Payoff under a breakthrough at period t (any t >= 0).
template <class S>
S payoff_at(const Mech<S>& m, const Pair<S>& p, int t) {
    const int h = m.horizon();
    S pre(0);
    S disc(1);
    for (int s = 0; s < t; ++s) {
        pre += (1 - m.beta) * disc * p.f0(m.x[std::min(s, h - 1)]);
        disc *= m.beta;
    }
    return S(pre + disc * p.f1(m.X1[std::min(t, h - 1)]));
}

/// Payoff when no breakthrough ever happens.
template <class S>
S payoff_never(const Mech<S>& m, const Pair<S>& p) {
    const int h = m.horizon();
    S pre(0);
    S disc(1);
    for (int s = 0; s < h - 1; ++s) {
        pre += (1 - m.beta) * disc * p.f0(m.x[s]);
        disc *= m.beta;
    }
    return S(pre + disc * p.f0(m.x[h - 1]));
}

/// Payoffs under point masses at 0..H-1 and "never". Later point masses are
/// affine combinations of the last two entries.
template <class S>
std::vector<S> payoff_vector(const Mech<S>& m, const Pair<S>& p) {
    std::vector<S> v;
    for (int t = 0; t < m.horizon(); ++t) v.push_back(payoff_at(m, p, t));
    v.push_back(payoff_never(m, p));
    return v;
}

enum class SlackCase { LowerReward = 1, RaiseFlow = 2, RaiseNextReward = 3 };

inline std::string to_string(SlackCase c) {
    switch (c) {
        case SlackCase::LowerReward: return "lower X1_t toward u1";
        case SlackCase::RaiseFlow: return "raise x_t toward u1";
        case SlackCase::RaiseNextReward: return "raise X1_{t+1} toward u1";
    }
    return "";
}

template <class S>
struct Improvement {
    Mech<S> mech;
    SlackCase slack_case;
    int period;
    S delta;
};

/// Uses slack in the delay constraint at one period to move an allocation
/// toward u1, by the largest step that keeps every constraint. The first slack
/// period and the first applicable case are used unless forced.
template <class S>
Improvement<S> improve_slack(const Mech<S>& m, const Pair<S>& p, std::optional<SlackCase> forced_case = std::nullopt,
                             std::optional<int> forced_period = std::nullopt, const S& tol = default_tol<S>()) {
    const IcResult ic = ic_discrete(m, tol);
    if (!ic.ok) throw Error(ErrorCode::InvalidArgument, "mechanism is not incentive compatible");
    std::vector<int> periods = ic.slack_periods;
    if (forced_period) {
        if (std::find(periods.begin(), periods.end(), *forced_period) == periods.end()) {
            throw Error(ErrorCode::NothingToImprove, "no slack at period " + std::to_string(*forced_period));
        }
        periods = {*forced_period};
    }
    if (periods.empty()) throw Error(ErrorCode::NothingToImprove, "no period with slack");

    const int h = m.horizon();
    for (int t : periods) {
        const S slack = delay_slack(m, t);
        const bool tail = t >= h - 1;
        for (SlackCase c : {SlackCase::LowerReward, SlackCase::RaiseFlow, SlackCase::RaiseNextReward}) {
            if (forced_case && c != *forced_case) continue;
            Mech<S> out = m;
            S delta(0);
            if (c == SlackCase::LowerReward && m.X1[t] > p.u1) {
                delta = std::min(S(m.X1[t] - p.u1), slack);
                out.X1[t] -= delta;
            } else if (c == SlackCase::RaiseFlow && m.x[t] < p.u1) {
                const S room = tail ? slack : S(slack / (1 - m.beta));
                delta = std::min(S(p.u1 - m.x[t]), room);
                out.x[t] += delta;
            } else if (c == SlackCase::RaiseNextReward && !tail && m.X1[t + 1] < p.u1) {
                delta = std::min(S(p.u1 - m.X1[t + 1]), S(slack / m.beta));
                out.X1[t + 1] += delta;
            } else {
                continue;
            }
            return {std::move(out), c, t, delta};
        }
    }
    throw Error(ErrorCode::NothingToImprove, "no case applies at the slack periods");
}

template <class S>
struct ScanResult {
    std::vector<Mech<S>> undominated;
    std::vector<std::vector<S>> payoffs;  // per undominated mechanism
    std::vector<S> gaps;                  // max_t |X1_t - X0_t| per undominated mechanism
    S indifference = S(0);                // max of gaps
    std::size_t enumerated = 0;
    std::size_t incentive_compatible = 0;
};

inline constexpr double kScanBudget = 1e7;

/// a weakly above b everywhere and strictly somewhere.
template <class S>
bool dominates(const std::vector<S>& a, const std::vector<S>& b, const S& tol) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - tol) return false;
        if (a[i] > b[i] + tol) strict = true;
    }
    return strict;
}

/// Enumerates every IC mechanism with x in x_grid^H and X1 in reward_grid^H and
/// keeps the Pareto-undominated ones (payoffs over point masses and "never").
/// Output is sorted lexicographically by (x, X1), so it does not depend on the
/// enumeration order; `shuffle_seed` permutes that order for testing.
template <class S>
ScanResult<S> undominated_scan(const Pair<S>& p, int horizon, S beta, const std::vector<S>& x_grid,
                               const std::vector<S>& reward_grid, const S& tol = default_tol<S>(),
                               std::optional<unsigned> shuffle_seed = std::nullopt) {
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (x_grid.empty() || reward_grid.empty()) throw Error(ErrorCode::InvalidArgument, "grids must be nonempty");
    const double count = std::pow(static_cast<double>(x_grid.size()), horizon) *
                         std::pow(static_cast<double>(reward_grid.size()), horizon);
    if (count > kScanBudget) {
        throw Error(ErrorCode::BudgetExceeded, "enumeration of " + std::to_string(count) + " mechanisms exceeds 1e7");
    }
    const std::size_t n = static_cast<std::size_t>(count);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle_seed) {
        std::mt19937 rng(*shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    ScanResult<S> res;
    std::vector<Mech<S>> ic;
    std::vector<std::vector<S>> pay;
    for (std::size_t idx : order) {
        Mech<S> m{beta, std::vector<S>(horizon), std::vector<S>(horizon)};
        std::size_t k = idx;
        for (int s = 0; s < horizon; ++s) {
            m.x[s] = x_grid[k % x_grid.size()];
            k /= x_grid.size();
        }
        for (int s = 0; s < horizon; ++s) {
            m.X1[s] = reward_grid[k % reward_grid.size()];
            k /= reward_grid.size();
        }
        ++res.enumerated;
        if (!ic_discrete(m, tol).ok) continue;
        pay.push_back(payoff_vector(m, p));
        ic.push_back(std::move(m));
    }
    res.incentive_compatible = ic.size();

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ic.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < ic.size() && !dominated; ++j) {
            if (j != i && dominates(pay[j], pay[i], tol)) dominated = true;
        }
        if (!dominated) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        if (ic[a].x != ic[b].x) return ic[a].x < ic[b].x;
        return ic[a].X1 < ic[b].X1;
    });

    for (std::size_t i : keep) {
        const std::vector<S> x0 = continuation(ic[i]);
        S gap(0);
        for (int s = 0; s < horizon; ++s) {
            const S d = ic[i].X1[s] > x0[s] ? S(ic[i].X1[s] - x0[s]) : S(x0[s] - ic[i].X1[s]);
            gap = std::max(gap, d);
        }
        res.gaps.push_back(gap);
        res.indifference = std::max(res.indifference, gap);
        res.undominated.push_back(ic[i]);
        res.payoffs.push_back(pay[i]);
    }
    return res;
}

/// Discrete deadline mechanism with continuation X0 = max(target, u_star):
/// u0 for k periods, one intermediate period, then u_star; X1 = X0.
template <class S>
Mech<S> front_load(S beta, const S& u0, const S& u_star, S target) {
    if (target < u_star) target = u_star;
    if (target >= u0) return materialize(beta, std::vector<S>{u0});
    std::vector<S> x;
    S disc(1);
    // k = number of leading u0 periods
    while (S((1 - disc * beta) * u0 + disc * beta * u_star) <= target) {
        x.push_back(u0);
        disc *= beta;
    }
    x.push_back(S(((target - (1 - disc) * u0) / disc - beta * u_star) / (1 - beta)));
    x.push_back(u_star);
    return materialize(beta, std::move(x));
}

/// Largest amount by which `m` beats `d` over point masses at 0..t_max and
/// "never"; <= 0 means d weakly dominates m on those distributions.
template <class S>
S shortfall(const Mech<S>& m, const Mech<S>& d, const Pair<S>& p, int t_max) {
    S worst = S(payoff_never(m, p) - payoff_never(d, p));
    for (int t = 0; t <= t_max; ++t) worst = std::max(worst, S(payoff_at(m, p, t) - payoff_at(d, p, t)));
    return worst;
}

}  // namespace screening::discrete
