#include "screening/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screening/errors.hpp"
#include "screening/numerics.hpp"

namespace screening {

namespace {

void check_frontier(const Frontier& f, const std::string& name, int grid, SimpleGate& gate) {
    const double lo = f.domain_lo();
    const double hi = f.domain_hi();
    const Derivs at_lo = f.eval_derivs(lo);
    const Derivs at_hi = f.eval_derivs(hi);
    if (!at_lo.d_plus.is_finite() || !at_hi.d_minus.is_finite()) {
        gate.failures.push_back(name + " has an unbounded slope at a domain end");
        return;
    }
    const double h = (hi - lo) / grid;
    double prev = f.slope(lo);
    for (int i = 1; i <= grid; ++i) {
        const double u = lo + h * i;
        const double cur = f.slope(std::min(u, hi));
        if (!((cur - prev) / h < -1e-9)) {
            gate.failures.push_back(name + " is not strictly concave near u = " + std::to_string(u));
            return;
        }
        prev = cur;
    }
}

}  // namespace

SimpleGate check_simple(const TechnologyPair& pair, int grid) {
    SimpleGate gate;
    check_frontier(pair.f0, "f0", grid, gate);
    check_frontier(pair.f1, "f1", grid, gate);
    const bool smooth = gate.failures.empty();
    if (pair.u_star > 0.0) {
        gate.simple = smooth;
    } else {
        gate.corner = smooth;
        gate.failures.push_back("u_star = 0");
    }
    return gate;
}

EulerSolver::EulerSolver(TechnologyPair pair, EulerOptions opt)
    : pair_(std::move(pair)), opt_(opt), gate_(check_simple(pair_)) {
    if (gate_.simple || (gate_.corner && opt_.allow_corner)) return;
    std::string why;
    for (const auto& f : gate_.failures) why += (why.empty() ? "" : "; ") + f;
    throw Error(ErrorCode::NotSimple, why);
}

double EulerSolver::inv_deriv_f0(double c) const {
    const double lo = pair_.u_star;
    const double hi = pair_.u0;
    if (c >= pair_.f0.slope(lo)) return lo;
    if (c <= pair_.f0.slope(hi)) return hi;
    const auto [a, b] = numerics::bisect_predicate([&](double u) { return pair_.f0.slope(u) <= c; }, lo, hi,
                                                   4e-16 * std::max(1.0, hi));
    return 0.5 * (a + b);
}

BackwardPass EulerSolver::backward_pass_with(const BreakthroughDist& g, double lambda,
                                             std::optional<double> eta) const {
    if (g.has_atom_at_zero()) throw Error(ErrorCode::AtomAtZero, "distribution has mass at t = 0");
    const auto atoms = g.atoms();
    const std::size_t k_n = atoms.size();
    BackwardPass out;
    out.levels.assign(k_n, lambda);
    out.rewards.assign(k_n, lambda);
    out.phi1.assign(k_n, eta ? *eta : pair_.f1.slope(lambda));

    double mass = atoms[k_n - 1].p;
    double weighted = mass * out.phi1[k_n - 1];
    for (std::size_t k = k_n - 1; k-- > 0;) {
        const double u = inv_deriv_f0(weighted / mass);
        const double dt = atoms[k + 1].t - atoms[k].t;
        const double w = -std::expm1(-pair_.r * dt);
        out.levels[k] = u;
        out.rewards[k] = w * u + (1.0 - w) * out.rewards[k + 1];
        out.phi1[k] = pair_.f1.slope(out.rewards[k]);
        mass += atoms[k].p;
        weighted += atoms[k].p * out.phi1[k];
    }
    return out;
}

BackwardPass EulerSolver::backward_pass(const BreakthroughDist& g, double lambda) const {
    if (!(lambda >= pair_.u_star && lambda <= pair_.u0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda must lie in [u_star, u0]");
    }
    return backward_pass_with(g, lambda, std::nullopt);
}

double EulerSolver::psi(const BreakthroughDist& g, double lambda) const {
    return g.expect(backward_pass(g, lambda).phi1);
}

EulerSolution EulerSolver::assemble(const BreakthroughDist& g, double lambda, BackwardPass path,
                                    double psi_value) const {
    EulerSolution sol;
    sol.lambda_star = lambda;
    sol.times = g.times();
    std::vector<double> grid{0.0};
    std::vector<double> levels{pair_.u0};
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        grid.push_back(sol.times[k]);
        levels.push_back(path.levels[k]);
    }
    sol.mechanism = Mechanism(std::move(grid), std::move(levels), pair_.r);
    sol.path = std::move(path);
    sol.psi_at_root = psi_value;
    sol.payoff = payoff(sol.mechanism, pair_, g).total.value();
    return sol;
}

EulerSolution EulerSolver::solve(const BreakthroughDist& g) const {
    if (g.has_atom_at_zero()) throw Error(ErrorCode::AtomAtZero, "distribution has mass at t = 0");
    const double lo = pair_.u_star;
    const double hi = pair_.u0;
    const double tol = opt_.psi_tol;
    auto f = [&](double lambda) { return psi(g, lambda); };

    const double psi_hi = f(hi);
    if (psi_hi > tol) {
        throw Error(ErrorCode::BracketFailure, "psi(u0) = " + std::to_string(psi_hi) + " > 0");
    }
    const double psi_lo = f(lo);
    if (psi_lo < -tol) {
        if (!gate_.corner) {
            throw Error(ErrorCode::BracketFailure, "psi(u_star) = " + std::to_string(psi_lo) + " < 0");
        }
        // Corner: raise the terminal multiplier above F1'(0) until E phi1 = 0.
        const double eta0 = pair_.f1.slope(lo);
        auto h = [&](double eta) { return g.expect(backward_pass_with(g, lo, eta).phi1); };
        double step = 1.0;
        double eta_hi = eta0 + step;
        int grow = 0;
        while (h(eta_hi) < 0.0) {
            if (++grow > 200) throw Error(ErrorCode::SolverFailure, "terminal multiplier diverges");
            step *= 2.0;
            eta_hi = eta0 + step;
        }
        const auto root = numerics::bisect(h, eta0, eta_hi, opt_.lambda_tol * std::max(1.0, eta_hi), tol);
        BackwardPass path = backward_pass_with(g, lo, root.x);
        const double v = g.expect(path.phi1);
        EulerSolution sol = assemble(g, lo, std::move(path), v);
        sol.corner = true;
        sol.roots = {lo};
        sol.root_payoffs = {sol.payoff};
        return sol;
    }

    const int n = std::max(opt_.scan_points, 2);
    std::vector<double> xs(n + 1);
    std::vector<double> vs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = (i == n) ? hi : lo + (hi - lo) * i / n;
        vs[i] = (i == 0) ? psi_lo : (i == n) ? psi_hi : f(xs[i]);
    }
    bool monotone = true;
    for (int i = 1; i <= n; ++i) {
        if (vs[i] > vs[i - 1] + 1e-12) monotone = false;
    }
    auto sign = [tol](double v) { return v > tol ? 1 : (v < -tol ? -1 : 0); };

    std::vector<double> roots;
    for (int i = 0; i <= n; ++i) {
        const int si = sign(vs[i]);
        if (si == 0) {
            if (i == 0 || sign(vs[i - 1]) != 0) roots.push_back(xs[i]);
            continue;
        }
        if (i < n && si * sign(vs[i + 1]) == -1) {
            roots.push_back(numerics::bisect(f, xs[i], xs[i + 1], opt_.lambda_tol, tol).x);
        }
    }
    if (roots.empty()) throw Error(ErrorCode::BracketFailure, "psi has no sign change on [u_star, u0]");

    std::optional<EulerSolution> best;
    std::vector<double> payoffs;
    for (double lambda : roots) {
        BackwardPass path = backward_pass(g, lambda);
        const double v = g.expect(path.phi1);
        EulerSolution cand = assemble(g, lambda, std::move(path), v);
        payoffs.push_back(cand.payoff);
        if (!best || cand.payoff > best->payoff) best = std::move(cand);
    }
    best->roots = roots;
    best->root_payoffs = payoffs;
    best->psi_monotone = monotone;
    return *best;
}

EulerResiduals euler_residuals(const EulerSolution& sol, const TechnologyPair& pair, const BreakthroughDist& g) {
    const auto atoms = g.atoms();
    const std::size_t k_n = sol.times.size();
    if (atoms.size() != k_n || sol.path.levels.size() != k_n || sol.path.rewards.size() != k_n) {
        throw Error(ErrorCode::InvalidArgument, "solution does not match the distribution");
    }
    std::vector<double> phi1(k_n);
    for (std::size_t k = 0; k < k_n; ++k) phi1[k] = pair.f1.slope(sol.path.rewards[k]);
    if (sol.corner && sol.path.phi1.size() == k_n) phi1[k_n - 1] = sol.path.phi1[k_n - 1];

    std::vector<double> tail_mass(k_n, 0.0);
    std::vector<double> tail_phi(k_n, 0.0);
    for (std::size_t k = k_n - 1; k-- > 0;) {
        tail_mass[k] = tail_mass[k + 1] + atoms[k + 1].p;
        tail_phi[k] = tail_phi[k + 1] + atoms[k + 1].p * phi1[k + 1];
    }

    const double clamp_tol = 1e-12 * std::max(1.0, pair.u0);
    EulerResiduals res;
    double head = 0.0;
    for (std::size_t k = 0; k < k_n; ++k) {
        const double u = sol.path.levels[k];
        double phi0 = pair.f0.slope(u);
        if (k + 1 < k_n) {
            const double c = tail_phi[k] / tail_mass[k];
            if (u <= pair.u_star + clamp_tol) phi0 = std::max(c, phi0);
            else if (u >= pair.u0 - clamp_tol) phi0 = std::min(c, phi0);
            res.forward.push_back(phi0 - c);
        }
        head += atoms[k].p * phi1[k];
        res.atom.push_back(tail_mass[k] * phi0 + head);
    }
    res.initial = head;

    res.max_abs = std::abs(res.initial);
    for (double v : res.atom) res.max_abs = std::max(res.max_abs, std::abs(v));
    for (double v : res.forward) res.max_abs = std::max(res.max_abs, std::abs(v));
    return res;
}

namespace {

std::vector<double> probe_grid(double t_end, int n) {
    std::vector<double> ts(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = t_end * i / n;
    return ts;
}

}  // namespace

GeneralSolution solve_general(const EulerSolver& solver, const Family& family, int m) {
    GeneralSolution out;
    out.m = m;
    const BreakthroughDist g = BreakthroughDist::discretize(family, m);
    const BreakthroughDist g_half = BreakthroughDist::discretize(family, std::max(1, m / 2));
    out.solution = solver.solve(g);
    out.half = solver.solve(g_half);
    const double t_end = 1.5 * std::max(g.atoms().back().t, g_half.atoms().back().t);
    for (double t : probe_grid(t_end, 200)) {
        const double gap = std::abs(out.solution.mechanism.continuation_value(t) -
                                    out.half.mechanism.continuation_value(t));
        out.self_gap = std::max(out.self_gap, gap);
    }
    return out;
}

StaticsReport comparative_statics_check(const EulerSolver& solver, const BreakthroughDist& g,
                                        const BreakthroughDist& g_dag) {
    StaticsReport rep;
    rep.mlr = order_checks(g, g_dag).mlr;
    const EulerSolution a = solver.solve(g);
    const EulerSolution b = solver.solve(g_dag);

    std::vector<double> ts{0.0};
    for (double t : a.times) ts.push_back(t);
    for (double t : b.times) ts.push_back(t);
    const double t_end = 1.5 * std::max(a.times.back(), b.times.back());
    for (double t : probe_grid(t_end, 99)) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    rep.x_ge = true;
    for (double t : ts) {
        const StaticsRow row{t, a.mechanism.continuation_value(t), b.mechanism.continuation_value(t)};
        if (rep.x_ge && row.X < row.X_dag - 1e-9) {
            rep.x_ge = false;
            rep.witness = t;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace screening
