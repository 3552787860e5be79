#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "screening/ext_real.hpp"

namespace screening {

struct Breakpoint {
    double u = 0.0;  // agent utility
    double v = 0.0;  // principal utility
};

/// Value and one-sided slopes of a frontier at a point.
///
/// At interior u the superdifferential is [d_plus, d_minus]. At the lower
/// (upper) end of the domain d_minus (d_plus) is +inf (-inf). Off the domain
/// the value is -inf and both slopes are undefined.
struct Derivs {
    ExtReal value;
    ExtReal d_plus;
    ExtReal d_minus;
};

/// A concave utility-possibility frontier u -> v.
///
/// Either piecewise linear (concave envelope of finitely many profiles) or
/// parametric (an evaluator plus an optional analytic derivative on a closed
/// interval). Immutable after construction.
class Frontier {
public:
    using Fn = std::function<double(double)>;

    /// Concave upper envelope of `points` restricted to [min u, max u].
    /// Duplicate u keep the highest v. Throws InvalidFrontier on fewer than two
    /// distinct u or non-finite input.
    static Frontier piecewise(std::vector<Breakpoint> points);

    /// Smooth frontier on [lo, hi]. Without `derivative`, slopes come from
    /// central differences with relative step 1e-6.
    static Frontier parametric(Fn value, Fn derivative, double lo, double hi,
                               std::string label = "parametric");

    /// v = peak_v - curvature (u - peak_u)^2 on [lo, hi].
    static Frontier quadratic(double peak_u, double peak_v, double curvature, double lo, double hi);

    Derivs eval_derivs(double u) const;
    ExtReal operator()(double u) const { return eval_derivs(u).value; }

    /// Finite value; throws SentinelArithmetic off the domain.
    double at(double u) const { return eval_derivs(u).value.value(); }

    /// Two-sided derivative where it exists, else the right slope (left slope at
    /// the upper domain end). Throws off the domain.
    double slope(double u) const;

    /// Maximizing u. Throws NonUniquePeak for a flat top.
    double peak() const;

    bool is_piecewise() const noexcept { return !breakpoints_.empty(); }
    std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }
    double domain_lo() const noexcept { return lo_; }
    double domain_hi() const noexcept { return hi_; }
    bool in_domain(double u) const noexcept { return u >= lo_ && u <= hi_; }
    const std::string& label() const noexcept { return label_; }
    bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }

    /// Affine on [a, b] (exact for piecewise frontiers, tolerance-based
    /// second-difference test for parametric ones).
    bool is_affine_on(double a, double b, double tol = 1e-9) const;

private:
    Frontier() = default;

    Derivs eval_piecewise(double u) const;
    Derivs eval_parametric(double u) const;

    std::vector<Breakpoint> breakpoints_;
    Fn value_;
    Fn derivative_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::string label_;
};

/// Two frontiers plus the structural constants derived from them.
struct TechnologyPair {
    Frontier f0;
    Frontier f1;
    double u0 = 0.0;      // peak of f0
    double u1 = 0.0;      // peak of f1
    double u_star = 0.0;  // rightmost shared-supergradient point left of u0
    double r = 1.0;       // discount rate
};

/// Computes peaks and u_star. Throws InvalidArgument for r <= 0.
TechnologyPair make_technology(Frontier f0, Frontier f1, double r);

/// Rightmost u in [0, u0) where the superdifferentials of f0 and f1 intersect;
/// 0 when the only intersection is at the origin.
double u_star(const Frontier& f0, const Frontier& f1);

/// Largest gap between f0 and its chord through (u_star, f0(u_star)) and
/// (u0, f0(u0)) on [u_star, u0].
double affine_gap(const Frontier& f0, double u_star, double u0);

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    std::optional<double> witness;  // a u where the check failed
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;

    bool all_pass() const;
    const AssumptionCheck* find(std::string_view name) const;
};

/// Pass/fail flags for each model assumption of a technology pair. Never throws
/// for a failed assumption; failures are reported with a witness.
AssumptionReport validate_model(const TechnologyPair& pair);

}  // namespace screening
