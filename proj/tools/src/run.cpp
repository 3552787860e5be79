#include "screening_cli/run.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "screening/deadline.hpp"
#include "screening/discrete_oracle.hpp"
#include "screening/errors.hpp"
#include "screening/euler.hpp"

namespace screening::cli {

namespace {

// Infinite and undefined values have no JSON number form.
Json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json num(const ExtReal& v) {
    if (v.is_finite()) return v.value();
    if (v.is_pos_inf()) return "inf";
    if (v.is_neg_inf()) return "-inf";
    return "undefined";
}

Json nums(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

struct Failure {
    int code;
    std::string message;
};

const BreakthroughDist& need_dist(const RunConfig& cfg) {
    if (!cfg.dist) throw ConfigError("command " + cfg.command + " needs \"distribution\"");
    return *cfg.dist;
}

const insurance::UiPrimitives& need_insurance(const RunConfig& cfg) {
    if (!cfg.insurance) throw ConfigError("command " + cfg.command + " needs an insurance technology");
    return *cfg.insurance;
}

Json tolerance_json(const Tolerances& t) {
    Json j;
    j["root"] = t.root;
    j["residual"] = t.residual;
    j["payoff"] = t.payoff;
    return j;
}

Json technology_json(const RunConfig& cfg) {
    const TechnologyPair& p = cfg.pair;
    Json j;
    j["kind"] = cfg.insurance ? "insurance" : "frontiers";
    j["r"] = p.r;
    j["u0"] = p.u0;
    j["u1"] = p.u1;
    j["u_star"] = p.u_star;
    if (p.u1 < p.u0) {
        j["t_underline"] = t_underline(p);
    } else {
        j["t_underline"] = nullptr;
    }
    const double gap = affine_gap(p.f0, p.u_star, p.u0);
    j["affine_gap"] = gap;
    j["f0_affine"] = gap <= 1e-9;
    return j;
}

Json checks_json(const AssumptionReport& rep) {
    Json arr = Json::array();
    for (const auto& c : rep.checks) {
        Json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["witness"] = c.witness ? Json(*c.witness) : Json(nullptr);
        j["detail"] = c.detail;
        arr.push_back(j);
    }
    return arr;
}

std::string mechanism_csv(const Mechanism& m, double horizon) {
    std::vector<double> extra;
    const double end = std::max({horizon, m.grid().back(), 1.0}) * 1.5;
    for (int i = 0; i <= 60; ++i) extra.push_back(end * i / 60);
    std::ostringstream os;
    write_csv(os, sample(m, extra));
    return os.str();
}

Json deadline_json(const DeadlineOptimum& d) {
    Json j;
    j["T_star"] = num(d.T_star);
    j["T_underline"] = d.T_underline;
    j["pi"] = d.pi;
    j["f0_affine"] = d.f0_affine;
    Json foc;
    foc["alpha"] = d.foc.alpha;
    foc["bracket_plus"] = d.foc.bracket_plus;
    foc["bracket_minus"] = d.foc.bracket_minus;
    foc["pi_plus"] = d.foc.pi_plus;
    foc["pi_minus"] = d.foc.pi_minus;
    foc["satisfied"] = d.foc.satisfied;
    j["foc"] = foc;
    j["infinite_anomaly"] = d.infinite_anomaly;
    j["candidates"] = nums(d.candidates);
    j["note"] = d.note;
    return j;
}

DeadlineOptions deadline_options(const Tolerances& t) {
    DeadlineOptions o;
    o.t_tol = std::min(o.t_tol, t.root);
    o.foc_tol = t.payoff;
    return o;
}

EulerOptions euler_options(const Tolerances& t) {
    EulerOptions o;
    o.psi_tol = t.root;
    o.lambda_tol = std::min(o.lambda_tol, t.root);
    return o;
}

void analyze(const RunConfig& cfg, RunResult& out) {
    const SimpleGate gate = check_simple(cfg.pair);
    Json g;
    g["simple"] = gate.simple;
    g["corner"] = gate.corner;
    g["failures"] = gate.failures;
    out.report["euler_gate"] = g;
}

void solve_deadline(const RunConfig& cfg, RunResult& out) {
    const BreakthroughDist& g = need_dist(cfg);
    const DeadlineOptimum d = optimize_deadline(cfg.pair, g, deadline_options(cfg.tol));
    out.report["deadline"] = deadline_json(d);
    const double last = g.atoms().back().t;
    out.files.push_back({"mechanism.csv", mechanism_csv(to_mechanism(DeadlineSpec::of(cfg.pair, d.T_star)),
                                                        std::isfinite(d.T_star) ? std::max(d.T_star, last) : last)});
    // FOC brackets along a T grid from T_underline.
    std::ostringstream os;
    os.precision(17);
    os << "T,pi,bracket_plus,bracket_minus\n";
    const double lo = d.T_underline;
    const double hi = std::max({lo + 1.0, last + 1.0, std::isfinite(d.T_star) ? d.T_star + 1.0 : 0.0});
    for (int i = 0; i <= 100; ++i) {
        const double T = lo + (hi - lo) * i / 100;
        const auto dv = pi_and_derivs(cfg.pair, DeadlineSpec::of(cfg.pair, T), g);
        os << T << ',' << dv.pi << ',' << dv.bracket_plus << ',' << dv.bracket_minus << '\n';
    }
    out.files.push_back({"residuals.csv", os.str()});
}

void solve_euler(const RunConfig& cfg, RunResult& out) {
    const BreakthroughDist& g = need_dist(cfg);
    const EulerSolver solver(cfg.pair, euler_options(cfg.tol));
    const EulerSolution sol = solver.solve(g);
    const EulerResiduals res = euler_residuals(sol, cfg.pair, g);
    Json j;
    j["lambda_star"] = sol.lambda_star;
    j["times"] = sol.times;
    j["levels"] = sol.path.levels;
    j["rewards"] = sol.path.rewards;
    j["X0"] = sol.mechanism.continuation_value(0.0);
    j["payoff"] = sol.payoff;
    j["psi_at_root"] = sol.psi_at_root;
    j["corner"] = sol.corner;
    j["psi_monotone"] = sol.psi_monotone;
    j["roots"] = sol.roots;
    j["root_payoffs"] = sol.root_payoffs;
    j["residual_max"] = res.max_abs;
    j["residual_ok"] = res.max_abs <= cfg.tol.residual;
    out.report["euler"] = j;
    out.files.push_back({"mechanism.csv", mechanism_csv(sol.mechanism, sol.times.back())});
    std::ostringstream os;
    os.precision(17);
    os << "k,t,atom,forward\n";
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        os << k + 1 << ',' << sol.times[k] << ',' << res.atom[k] << ',';
        if (k < res.forward.size()) os << res.forward[k];
        os << '\n';
    }
    os << "initial,," << res.initial << ",\n";
    out.files.push_back({"residuals.csv", os.str()});
}

Json mechanism_literal(const RunConfig& cfg) {
    const Json& o = cfg.options;
    if (o.contains("mechanism")) return o.at("mechanism");
    if (o.contains("mechanism_file")) {
        if (!o.at("mechanism_file").is_string()) throw ConfigError("\"mechanism_file\" must be a path");
        std::filesystem::path p = o.at("mechanism_file").get<std::string>();
        if (p.is_relative()) p = cfg.base_dir / p;
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open mechanism file " + p.string());
        try {
            return Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ConfigError(std::string("malformed mechanism file: ") + e.what());
        }
    }
    return nullptr;
}

Mechanism config_mechanism(const RunConfig& cfg, const Json& lit) {
    try {
        return parse_mechanism(lit, cfg.pair);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
}

void verify(const RunConfig& cfg, RunResult& out) {
    const Json lit = mechanism_literal(cfg);
    if (lit.is_null()) throw ConfigError("verify needs options.mechanism or options.mechanism_file");
    const Mechanism m = config_mechanism(cfg, lit);
    const IcReport ic = ic_check(m);
    Json j;
    j["ic"] = ic.ic;
    j["clause"] = ic.clause == IcClause::Delay ? "delay" : ic.clause == IcClause::NonDisclosure ? "non-disclosure" : "none";
    j["violation_time"] = ic.violation_time ? Json(*ic.violation_time) : Json(nullptr);
    j["violation"] = ic.violation;

    const bool affine = affine_gap(cfg.pair.f0, cfg.pair.u_star, cfg.pair.u0) <= 1e-9;
    std::string cls;
    if (!ic.ic) {
        cls = "not incentive compatible";
    } else if (lit.at("kind") == "deadline") {
        const double T = lit.contains("T") && lit.at("T").is_number() ? lit.at("T").get<double>() : kNoDeadline;
        const double tu = cfg.pair.u1 < cfg.pair.u0 ? t_underline(cfg.pair) : 0.0;
        if (!affine) {
            cls = "deadline, f0 not affine";
        } else if (T >= tu - 1e-12) {
            cls = "deadline, T ≥ T_underline";
        } else {
            cls = "deadline, T < T_underline (dominated)";
        }
    } else if (affine) {
        const FrontLoad fl = front_load(m, cfg.pair);
        cls = "step, weakly dominated by front-loaded deadline";
        j["front_load_T"] = num(fl.deadline.T);
    } else {
        cls = "step, f0 not affine";
    }
    j["undominated_class"] = cls;
    if (cfg.dist) j["payoff"] = num(payoff(m, cfg.pair, *cfg.dist).total);
    out.report["verify"] = j;
    out.files.push_back({"mechanism.csv", mechanism_csv(m, 0.0)});
}

void compare_statics(const RunConfig& cfg, RunResult& out) {
    const BreakthroughDist& g = need_dist(cfg);
    if (!cfg.dist_dag) throw ConfigError("compare-statics needs \"distribution_dag\"");
    const BreakthroughDist& gd = *cfg.dist_dag;
    const OrderReport ord = order_checks(g, gd);
    Json j;
    j["fosd"] = ord.fosd;
    j["mlr"] = ord.mlr;
    j["mlr_reason"] = ord.mlr_reason;
    const auto opt = deadline_options(cfg.tol);
    const double T = optimize_deadline(cfg.pair, g, opt).T_star;
    const double Td = optimize_deadline(cfg.pair, gd, opt).T_star;
    j["T_star"] = num(T);
    j["T_star_dag"] = num(Td);
    j["T_star_ge"] = T >= Td - cfg.tol.payoff;
    const SimpleGate gate = check_simple(cfg.pair);
    if (gate.simple || gate.corner) {
        const EulerSolver solver(cfg.pair, euler_options(cfg.tol));
        const StaticsReport st = comparative_statics_check(solver, g, gd);
        j["euler_x_ge"] = st.x_ge;
        j["euler_witness"] = st.witness ? Json(*st.witness) : Json(nullptr);
        std::ostringstream os;
        os.precision(17);
        os << "t,X,X_dag\n";
        for (const auto& r : st.rows) os << r.t << ',' << r.X << ',' << r.X_dag << '\n';
        out.files.push_back({"mechanism.csv", os.str()});
    } else {
        j["euler_x_ge"] = nullptr;
        j["euler_witness"] = nullptr;
    }
    out.report["compare_statics"] = j;
}

void ui_schedule(const RunConfig& cfg, RunResult& out) {
    const auto& p = need_insurance(cfg);
    const Json lit = mechanism_literal(cfg);
    Json j;
    Mechanism m = Mechanism::constant(cfg.pair.u0, cfg.r);
    if (!lit.is_null()) {
        m = config_mechanism(cfg, lit);
    } else {
        const DeadlineOptimum d = optimize_deadline(cfg.pair, need_dist(cfg), deadline_options(cfg.tol));
        j["T_star"] = num(d.T_star);
        m = to_mechanism(DeadlineSpec::of(cfg.pair, d.T_star));
    }
    const auto rows = insurance::schedule(p, m, 40);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(std::pow(r.C, p.a) - std::pow(r.L, p.b) - r.X));
    j["u0"] = cfg.pair.u0;
    j["eps_linear"] = insurance::eps_linear(p);
    j["benefit_start"] = rows.front().benefit;
    j["benefit_end"] = rows.back().benefit;
    j["identity_error"] = worst;
    j["rows"] = rows.size();
    out.report["ui_schedule"] = j;
    std::ostringstream os;
    insurance::write_schedule_csv(os, rows);
    out.files.push_back({"mechanism.csv", os.str()});
}

void ui_sweep(const RunConfig& cfg, RunResult& out) {
    const auto& p = need_insurance(cfg);
    std::vector<double> shadows{0.5, 0.2, 0.1, 0.05};
    if (cfg.options.contains("shadows")) {
        try {
            shadows = cfg.options.at("shadows").get<std::vector<double>>();
        } catch (const Json::exception&) {
            throw ConfigError("\"shadows\" must be an array of numbers");
        }
        for (std::size_t i = 0; i < shadows.size(); ++i) {
            if (!(shadows[i] > 0.0) || (i > 0 && !(shadows[i] < shadows[i - 1]))) {
                throw ConfigError("\"shadows\" must be positive and decreasing");
            }
        }
    }
    const auto rows = insurance::welfare_sweep(p, shadows, need_dist(cfg));
    Json arr = Json::array();
    bool monotone = true;
    bool gaps = true;
    std::ostringstream os;
    os.precision(17);
    os << "shadow,u0,pi_deadline,T_star,pi_star,ratio,eps_linear,affine_gap\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        Json row;
        row["shadow"] = r.shadow;
        row["u0"] = r.u0;
        row["pi_deadline"] = r.deadline;
        row["T_star"] = num(r.T_star);
        row["pi_star"] = r.optimum;
        row["ratio"] = r.ratio;
        row["eps_linear"] = r.eps_linear;
        row["affine_gap"] = r.affine_gap;
        row["gap_ok"] = r.gap_ok;
        row["corner"] = r.corner;
        arr.push_back(row);
        gaps = gaps && r.gap_ok;
        if (i > 0 && !(r.ratio > rows[i - 1].ratio)) monotone = false;
        os << r.shadow << ',' << r.u0 << ',' << r.deadline << ',' << r.T_star << ',' << r.optimum << ',' << r.ratio
           << ',' << r.eps_linear << ',' << r.affine_gap << '\n';
    }
    Json j;
    j["rows"] = arr;
    j["ratio_increasing"] = monotone;
    j["gap_bound_holds"] = gaps;
    out.report["ui_sweep"] = j;
    out.files.push_back({"welfare.csv", os.str()});
}

std::vector<double> grid_option(const Json& o, const char* key, std::vector<double> fallback) {
    if (!o.contains(key)) return fallback;
    try {
        return o.at(key).get<std::vector<double>>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("\"") + key + "\" must be an array of numbers");
    }
}

void oracle(const RunConfig& cfg, RunResult& out) {
    const Json& o = cfg.options;
    int horizon = 2;
    double beta = std::exp(-cfg.r);
    std::size_t points = 9;
    try {
        horizon = o.value("H", 2);
        beta = o.value("beta", beta);
        points = o.value("grid_points", std::size_t{9});
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
    if (horizon < 1 || !(beta > 0.0 && beta < 1.0) || points < 2) {
        throw ConfigError("oracle needs H >= 1, beta in (0,1), grid_points >= 2");
    }
    std::vector<double> uniform;
    for (std::size_t i = 0; i < points; ++i) {
        uniform.push_back(cfg.pair.u_star + (cfg.pair.u0 - cfg.pair.u_star) * static_cast<double>(i) / (points - 1));
    }
    const auto rewards = grid_option(o, "reward_grid", uniform);
    const auto flows = grid_option(o, "x_grid", rewards);
    const auto p = discrete::from_technology(cfg.pair);
    const auto res = discrete::undominated_scan<double>(p, horizon, beta, flows, rewards, cfg.tol.payoff);
    Json j;
    j["H"] = horizon;
    j["beta"] = beta;
    j["enumerated"] = res.enumerated;
    j["incentive_compatible"] = res.incentive_compatible;
    j["undominated_count"] = res.undominated.size();
    j["indifference"] = res.indifference;
    Json arr = Json::array();
    for (std::size_t i = 0; i < res.undominated.size(); ++i) {
        Json m;
        m["x"] = res.undominated[i].x;
        m["X1"] = res.undominated[i].X1;
        m["gap"] = res.gaps[i];
        m["payoffs"] = res.payoffs[i];
        arr.push_back(m);
    }
    j["undominated"] = arr;
    out.report["oracle"] = j;
}

int code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotSimple:
            return kAssumptionFailure;
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidFrontier:
        case ErrorCode::EmptyDistribution:
            return kConfigError;
        default:
            return kSolverError;
    }
}

}  // namespace

RunResult execute(const RunConfig& cfg) {
    RunResult out;
    out.report["command"] = cfg.command;
    out.report["tolerances"] = tolerance_json(cfg.tol);
    if (cfg.insurance) {
        Json ui;
        ui["a"] = cfg.insurance->a;
        ui["b"] = cfg.insurance->b;
        ui["w"] = cfg.insurance->w;
        ui["shadow"] = cfg.insurance->shadow;
        out.report["insurance"] = ui;
    }
    out.report["technology"] = technology_json(cfg);
    AssumptionReport checks = validate_model(cfg.pair);
    if (cfg.insurance) {
        for (auto& c : insurance::grid_checks(*cfg.insurance).checks) checks.checks.push_back(std::move(c));
    }
    out.report["assumptions"] = checks_json(checks);
    out.report["status"] = "ok";
    if (!checks.all_pass()) {
        out.exit_code = kAssumptionFailure;
        out.report["status"] = "assumption_failure";
    }
    if (out.exit_code == kOk || cfg.command == "analyze") {
        try {
            if (cfg.command == "analyze") analyze(cfg, out);
            else if (cfg.command == "solve-deadline") solve_deadline(cfg, out);
            else if (cfg.command == "solve-euler") solve_euler(cfg, out);
            else if (cfg.command == "verify") verify(cfg, out);
            else if (cfg.command == "compare-statics") compare_statics(cfg, out);
            else if (cfg.command == "ui-schedule") ui_schedule(cfg, out);
            else if (cfg.command == "ui-sweep") ui_sweep(cfg, out);
            else if (cfg.command == "oracle") oracle(cfg, out);
            else throw ConfigError("unknown command \"" + cfg.command + "\"");
        } catch (const Error& e) {
            out.exit_code = code_for(e.code());
            if (out.exit_code == kConfigError) throw ConfigError(e.what());
            out.report["status"] = out.exit_code == kAssumptionFailure ? "assumption_failure" : "solver_error";
            out.report["error"] = e.what();
            out.files.clear();
        }
    }
    out.files.insert(out.files.begin(), {"report.json", out.report.dump(2) + "\n"});
    return out;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
        for (const auto& f : files) {
            const fs::path tmp = dir / ("." + f.name + ".tmp");
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            os << f.content;
            os.close();
            if (!os) throw std::runtime_error("cannot write " + tmp.string());
            staged.emplace_back(tmp, dir / f.name);
        }
    } catch (...) {
        for (const auto& s : staged) fs::remove(s.first);
        throw;
    }
    for (const auto& [tmp, dst] : staged) fs::rename(tmp, dst);
}

}  // namespace screening::cli
