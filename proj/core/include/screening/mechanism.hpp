#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "screening/deadline_spec.hpp"
#include "screening/distribution.hpp"
#include "screening/ext_real.hpp"
#include "screening/frontier.hpp"

namespace screening {

/// Disclosure reward on one grid cell: X1_t = level + growth * e^{r (t - s_i)}.
/// Constant rewards have growth 0; the continuation value of a step flow has
/// exactly this shape inside each cell.
struct CellReward {
    double level = 0.0;
    double growth = 0.0;
};

/// Right-continuous step flow on a finite grid 0 = s_0 < ... < s_{n-1}; the
/// last level holds on [s_{n-1}, inf).
///
/// The disclosure reward is either derived (X1 = X0, the continuation value of
/// the flow) or explicit, per cell.
class Mechanism {
public:
    Mechanism(std::vector<double> grid, std::vector<double> levels, double r);

    static Mechanism constant(double level, double r) { return Mechanism({0.0}, {level}, r); }

    Mechanism with_reward(std::vector<CellReward> reward) const;
    Mechanism with_constant_reward(std::span<const double> reward) const;
    /// Explicit reward equal to the continuation value, cell by cell.
    Mechanism with_materialized_reward() const;

    bool has_explicit_reward() const noexcept { return !reward_.empty(); }
    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> levels() const noexcept { return levels_; }
    std::span<const CellReward> explicit_reward() const noexcept { return reward_; }
    double r() const noexcept { return r_; }

    std::size_t cell(double t) const;
    double flow(double t) const { return levels_[cell(t)]; }

    /// X_t = r * int_t^inf e^{-r(s-t)} x_s ds, exact per cell.
    double continuation_value(double t) const;
    /// X1_t: explicit reward, or the continuation value when derived.
    double reward(double t) const;

    /// Levels replaced by min(level, cap).
    Mechanism capped(double cap) const;

private:
    std::vector<double> grid_;
    std::vector<double> levels_;
    std::vector<double> value_at_grid_;  // X at each grid point
    std::vector<CellReward> reward_;
    double r_;
};

Mechanism to_mechanism(const DeadlineSpec& d);

struct PayoffRow {
    double t = 0.0;
    double p = 0.0;
    ExtReal pre;   // r int_0^t e^{-rs} F0(x_s) ds
    ExtReal post;  // e^{-rt} F1(X1_t)
};

struct PayoffBreakdown {
    ExtReal total;
    ExtReal pre_disclosure;
    ExtReal post_disclosure;
    std::vector<PayoffRow> rows;
    bool off_domain = false;  // some atom evaluated a frontier off its domain
};

/// Principal's expected payoff under G, integrated exactly over step cells.
/// Off-domain evaluations yield total = -inf with off_domain set.
PayoffBreakdown payoff(const Mechanism& m, const TechnologyPair& pair, const BreakthroughDist& g);

enum class IcClause { None, Delay, NonDisclosure };

struct IcReport {
    bool ic = true;
    std::vector<std::pair<double, double>> h_values;  // (t, h(t)) at checkpoints
    IcClause clause = IcClause::None;
    std::optional<double> violation_time;
    std::string violation;
};

/// Incentive compatibility via h(t) = e^{-rt}(X1_t - X0_t): IC iff h is
/// non-increasing (delay) and non-negative (non-disclosure), tolerance 1e-12.
IcReport ic_check(const Mechanism& m);

struct FrontLoad {
    DeadlineSpec deadline;
    bool f0_affine = true;  // false: transform is defined but the dominance guarantee lapses
};

/// Deadline mechanism with X0 = max(X0(m), u_star). Throws InvalidArgument if
/// X0(m) exceeds u0.
FrontLoad front_load(const Mechanism& m, const TechnologyPair& pair);

struct MechanismSample {
    double t = 0.0;
    double x = 0.0;
    double X = 0.0;
    double X1 = 0.0;
};

/// Samples at grid points plus `extra_times`, sorted and de-duplicated.
std::vector<MechanismSample> sample(const Mechanism& m, std::span<const double> extra_times = {});

/// CSV with header t,x,X,X1.
void write_csv(std::ostream& os, std::span<const MechanismSample> rows);

}  // namespace screening
