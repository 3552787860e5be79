#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace screening {

struct Atom {
    double t = 0.0;  // breakthrough time
    double p = 0.0;  // probability mass
};

struct Exponential {
    double rate = 1.0;
};

struct Weibull {
    double shape = 1.0;
    double scale = 1.0;
};

struct PointMass {
    double t = 0.0;
};

using Family = std::variant<Exponential, Weibull, PointMass>;

/// Finite-support distribution of the breakthrough time.
///
/// Atom times are snapped to a 1e-12 lattice, strictly increasing, with
/// positive masses summing to one.
class BreakthroughDist {
public:
    /// Sorts, merges equal (snapped) times and normalizes. Throws
    /// EmptyDistribution for zero total mass and InvalidArgument for negative
    /// times or masses.
    static BreakthroughDist from_atoms(std::vector<Atom> atoms);

    static BreakthroughDist point(double t) { return from_atoms({{t, 1.0}}); }

    /// m equal-mass atoms at the quantiles (i - 0.5)/m, i = 1..m.
    static BreakthroughDist discretize(const Family& family, int m);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    std::vector<double> times() const;

    /// G(t) = P(tau <= t).
    double cdf(double t) const;
    /// G(t-) = P(tau < t).
    double cdf_left(double t) const;
    /// 1 - G(t), summed over atoms after t (no cancellation).
    double survival(double t) const;

    bool has_atom_at_zero() const noexcept { return !atoms_.empty() && atoms_.front().t == 0.0; }

    /// E(phi(tau) | tau > t) with phi given per atom. Throws ConditioningOnNull
    /// when no atom lies strictly after t.
    double cond_expect(double t, std::span<const double> phi) const;

    /// E(phi(tau)).
    double expect(std::span<const double> phi) const;

private:
    std::vector<Atom> atoms_;
};

std::string describe(const Family& family);

struct OrderReport {
    bool fosd = false;  // G first-order stochastically dominates G_dag
    bool mlr = false;   // G likelihood-ratio dominates G_dag
    std::string mlr_reason;
};

/// Stochastic-order tests of `g` against `g_dag`. MLR requires equal supports;
/// otherwise mlr is false with a reason.
OrderReport order_checks(const BreakthroughDist& g, const BreakthroughDist& g_dag);

}  // namespace screening
