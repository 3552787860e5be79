#pragma once

#include <string>
#include <vector>

#include "screening/deadline_spec.hpp"
#include "screening/distribution.hpp"
#include "screening/frontier.hpp"

namespace screening {

/// Reward of the deadline mechanism: decreasing toward u_star until T, then
/// constant at u_star. Equal to u0 everywhere for T = inf.
double reward_at(const DeadlineSpec& d, double t);

/// Deadline at which X0 = u1. Zero when u1 = u_star; throws InvalidArgument
/// when u1 >= u0.
double t_underline(const TechnologyPair& pair);

/// (F0(u0) - F0(u_star)) / (u0 - u_star).
double affine_slope(const TechnologyPair& pair);

/// Principal's payoff from the deadline mechanism with deadline T under G.
double deadline_payoff(const TechnologyPair& pair, double T, const BreakthroughDist& g);

struct DeadlineDerivs {
    double pi = 0.0;
    double alpha = 0.0;
    double bracket_plus = 0.0;   // [1-G(T)] alpha + sum_{t_k <= T} p_k F1+(X_{t_k})
    double bracket_minus = 0.0;  // [1-G(T-)] alpha + sum_{t_k < T} p_k F1-(X_{t_k})
    double pi_plus = 0.0;        // e^{-rT} (u0 - u_star) bracket_plus
    double pi_minus = 0.0;
};

DeadlineDerivs pi_and_derivs(const TechnologyPair& pair, const DeadlineSpec& d, const BreakthroughDist& g);

struct FocReport {
    double alpha = 0.0;
    double pi_plus = 0.0;
    double pi_minus = 0.0;
    double bracket_plus = 0.0;
    double bracket_minus = 0.0;
    bool satisfied = false;  // bracket_plus <= tol and bracket_minus >= -tol
};

struct DeadlineOptions {
    double t_tol = 1e-12;    // bisection width in T
    double foc_tol = 1e-9;
    double affine_tol = 1e-9;
    int scan_points = 400;   // sign-change scan when f0 is not affine
};

struct DeadlineOptimum {
    double T_star = 0.0;
    double T_underline = 0.0;
    double pi = 0.0;
    FocReport foc;
    bool f0_affine = true;
    /// T = inf beats every finite probe; T_star is then the best finite probe.
    bool infinite_anomaly = false;
    std::vector<double> candidates;  // all roots considered (non-affine case)
    std::string note;
};

/// Best deadline T in [T_underline, inf) for G.
///
/// With f0 affine on [u_star, u0] the pi_plus bracket down-crosses once and a
/// single bisection finds T_star. Otherwise every sign change found on a scan
/// is bisected and the root with the highest payoff is kept.
DeadlineOptimum optimize_deadline(const TechnologyPair& pair, const BreakthroughDist& g,
                                  const DeadlineOptions& opt = {});

FocReport foc_report(const TechnologyPair& pair, double T, const BreakthroughDist& g, double tol = 1e-9);

}  // namespace screening
