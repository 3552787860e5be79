#include "screening/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "screening/errors.hpp"

namespace screening {

namespace {

constexpr double kLattice = 1e-12;

double snap(double t) { return std::round(t / kLattice) * kLattice; }

double quantile(const Family& family, double q) {
    return std::visit(
        [q](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Exponential>) {
                return -std::log1p(-q) / f.rate;
            } else if constexpr (std::is_same_v<F, Weibull>) {
                return f.scale * std::pow(-std::log1p(-q), 1.0 / f.shape);
            } else {
                return f.t;
            }
        },
        family);
}

void validate(const Family& family) {
    std::visit(
        [](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Exponential>) {
                if (!(f.rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponential rate must be > 0");
            } else if constexpr (std::is_same_v<F, Weibull>) {
                if (!(f.shape > 0.0) || !(f.scale > 0.0)) {
                    throw Error(ErrorCode::InvalidArgument, "weibull shape and scale must be > 0");
                }
            } else {
                if (!(f.t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "point time must be >= 0");
            }
        },
        family);
}

}  // namespace

BreakthroughDist BreakthroughDist::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw Error(ErrorCode::EmptyDistribution, "no atoms");
    for (auto& a : atoms) {
        if (!std::isfinite(a.t) || a.t < 0.0) throw Error(ErrorCode::InvalidArgument, "atom times must be finite and >= 0");
        if (!std::isfinite(a.p) || a.p < 0.0) throw Error(ErrorCode::InvalidArgument, "atom masses must be finite and >= 0");
        a.t = snap(a.t);
    }
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });

    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (a.p == 0.0) continue;
        if (!merged.empty() && merged.back().t == a.t) {
            merged.back().p += a.p;
        } else {
            merged.push_back(a);
        }
    }
    double total = 0.0;
    for (const auto& a : merged) total += a.p;
    if (merged.empty() || !(total > 0.0)) throw Error(ErrorCode::EmptyDistribution, "total mass is zero");
    for (auto& a : merged) a.p /= total;

    BreakthroughDist g;
    g.atoms_ = std::move(merged);
    return g;
}

BreakthroughDist BreakthroughDist::discretize(const Family& family, int m) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "atom count must be >= 1");
    validate(family);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        atoms.push_back({quantile(family, (i - 0.5) / m), 1.0 / m});
    }
    return from_atoms(std::move(atoms));
}

std::vector<double> BreakthroughDist::times() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.t);
    return out;
}

double BreakthroughDist::cdf(double t) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.t > t) break;
        s += a.p;
    }
    return std::min(s, 1.0);
}

double BreakthroughDist::cdf_left(double t) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.t >= t) break;
        s += a.p;
    }
    return std::min(s, 1.0);
}

double BreakthroughDist::survival(double t) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.t > t) s += a.p;
    }
    return s;
}

double BreakthroughDist::cond_expect(double t, std::span<const double> phi) const {
    if (phi.size() != atoms_.size()) throw Error(ErrorCode::InvalidArgument, "phi must have one value per atom");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (atoms_[k].t > t) {
            num += atoms_[k].p * phi[k];
            den += atoms_[k].p;
        }
    }
    if (!(den > 0.0)) throw Error(ErrorCode::ConditioningOnNull, "no atom after the conditioning time");
    return num / den;
}

double BreakthroughDist::expect(std::span<const double> phi) const {
    if (phi.size() != atoms_.size()) throw Error(ErrorCode::InvalidArgument, "phi must have one value per atom");
    double s = 0.0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) s += atoms_[k].p * phi[k];
    return s;
}

std::string describe(const Family& family) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Exponential>) {
                os << "exponential(" << f.rate << ")";
            } else if constexpr (std::is_same_v<F, Weibull>) {
                os << "weibull(" << f.shape << "," << f.scale << ")";
            } else {
                os << "point(" << f.t << ")";
            }
        },
        family);
    return os.str();
}

OrderReport order_checks(const BreakthroughDist& g, const BreakthroughDist& g_dag) {
    constexpr double tol = 1e-12;
    OrderReport report;

    std::vector<double> grid = g.times();
    for (double t : g_dag.times()) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    report.fosd = std::all_of(grid.begin(), grid.end(),
                              [&](double t) { return g.cdf(t) <= g_dag.cdf(t) + tol; });

    const auto a = g.atoms();
    const auto b = g_dag.atoms();
    if (a.size() != b.size() ||
        !std::equal(a.begin(), a.end(), b.begin(), [](const Atom& x, const Atom& y) { return x.t == y.t; })) {
        report.mlr = false;
        report.mlr_reason = "unequal supports";
        return report;
    }
    report.mlr = true;
    for (std::size_t k = 1; k < a.size(); ++k) {
        // p_k / pdag_k non-decreasing, compared by cross-multiplication.
        if (a[k].p * b[k - 1].p < a[k - 1].p * b[k].p * (1.0 - tol)) {
            report.mlr = false;
            report.mlr_reason = "likelihood ratio decreases";
            break;
        }
    }
    return report;
}

}  // namespace screening
