#pragma once

#include <optional>
#include <string>
#include <vector>

#include "screening/distribution.hpp"
#include "screening/frontier.hpp"
#include "screening/mechanism.hpp"

namespace screening {

struct SimpleGate {
    bool simple = false;  // strictly concave, finite end slopes, u_star > 0
    bool corner = false;  // as simple but u_star = 0; solved with boundary multipliers
    std::vector<std::string> failures;
};

/// Numerical check of the hypotheses the backward recursion needs.
SimpleGate check_simple(const TechnologyPair& pair, int grid = 200);

struct EulerOptions {
    double psi_tol = 1e-10;
    double lambda_tol = 1e-12;
    int scan_points = 50;
    bool allow_corner = true;
};

struct BackwardPass {
    std::vector<double> levels;   // u_1..u_K
    std::vector<double> rewards;  // X_1..X_K
    std::vector<double> phi1;     // post-disclosure multipliers per atom
};

struct EulerSolution {
    double lambda_star = 0.0;
    std::vector<double> times;  // atom times t_1..t_K
    BackwardPass path;
    Mechanism mechanism = Mechanism::constant(0.0, 1.0);
    double psi_at_root = 0.0;
    double payoff = 0.0;
    bool corner = false;      // terminal multiplier raised above F1'(0)
    bool psi_monotone = true;  // on the scan grid
    std::vector<double> roots;
    std::vector<double> root_payoffs;
};

struct EulerResiduals {
    std::vector<double> atom;     // [1-G(t_k)] phi0_k + sum_{j<=k} p_j phi1_j
    std::vector<double> forward;  // phi0_k - E(phi1 | tau > t_k), k < K
    double initial = 0.0;         // E phi1
    double max_abs = 0.0;
};

/// Backward recursion in the terminal level plus root finding on
/// psi(lambda) = E F1'(X_tau).
///
/// Construction runs the simple gate once and throws NotSimple unless the pair
/// passes it (or qualifies for the corner mode at u_star = 0).
class EulerSolver {
public:
    explicit EulerSolver(TechnologyPair pair, EulerOptions opt = {});

    const TechnologyPair& pair() const noexcept { return pair_; }
    const SimpleGate& gate() const noexcept { return gate_; }
    const EulerOptions& options() const noexcept { return opt_; }

    /// Inverse of F0' clamped into [u_star, u0].
    double inv_deriv_f0(double c) const;

    /// Throws AtomAtZero if G has mass at 0.
    BackwardPass backward_pass(const BreakthroughDist& g, double lambda) const;
    double psi(const BreakthroughDist& g, double lambda) const;

    /// Throws BracketFailure if psi has no sign change on [u_star, u0].
    EulerSolution solve(const BreakthroughDist& g) const;

private:
    BackwardPass backward_pass_with(const BreakthroughDist& g, double lambda, std::optional<double> eta) const;
    EulerSolution assemble(const BreakthroughDist& g, double lambda, BackwardPass path, double psi) const;

    TechnologyPair pair_;
    EulerOptions opt_;
    SimpleGate gate_;
};

/// Residuals of the Euler equation on the stored levels and rewards.
EulerResiduals euler_residuals(const EulerSolution& sol, const TechnologyPair& pair, const BreakthroughDist& g);

struct GeneralSolution {
    int m = 0;
    EulerSolution solution;
    EulerSolution half;      // solution at max(1, m/2) atoms
    double self_gap = 0.0;   // sup |X_m - X_{m/2}| on the probe grid
};

GeneralSolution solve_general(const EulerSolver& solver, const Family& family, int m);

struct StaticsRow {
    double t = 0.0;
    double X = 0.0;
    double X_dag = 0.0;
};

struct StaticsReport {
    bool mlr = false;
    bool x_ge = false;
    std::optional<double> witness;
    std::vector<StaticsRow> rows;
};

/// Solves for G and G_dag and checks X >= X_dag - 1e-9 on the union of atom
/// times plus 100 probe times.
StaticsReport comparative_statics_check(const EulerSolver& solver, const BreakthroughDist& g,
                                        const BreakthroughDist& g_dag);

}  // namespace screening
