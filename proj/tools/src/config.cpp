#include "screening_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "screening/deadline_spec.hpp"
#include "screening/errors.hpp"

namespace screening::cli {

namespace {

double number(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
    const Json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

int integer_or(const Json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
    return j.at(key).get<int>();
}

std::vector<double> numbers(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string kind(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("object with a string \"kind\" expected");
    }
    return j.at("kind").get<std::string>();
}

insurance::UiPrimitives parse_ui(const Json& j, double r) {
    return {number(j, "a"), number(j, "b"), number(j, "w"), number(j, "shadow"), r};
}

}  // namespace

bool is_command(const std::string& name) {
    return std::find(std::begin(kCommands), std::end(kCommands), name) != std::end(kCommands);
}

Frontier parse_frontier(const Json& j) {
    const std::string k = kind(j);
    if (k == "piecewise") {
        if (!j.contains("points") || !j.at("points").is_array()) throw ConfigError("\"points\" must be an array");
        std::vector<Breakpoint> pts;
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw ConfigError("each point must be [u, v]");
            }
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        return Frontier::piecewise(std::move(pts));
    }
    if (k == "quadratic") {
        const auto dom = numbers(j, "domain");
        if (dom.size() != 2) throw ConfigError("\"domain\" must be [lo, hi]");
        return Frontier::quadratic(number(j, "peak_u"), number(j, "peak_v"), number(j, "curvature"), dom[0], dom[1]);
    }
    throw ConfigError("unknown frontier kind \"" + k + "\"");
}

BreakthroughDist parse_distribution(const Json& j) {
    const std::string k = kind(j);
    if (k == "point") return BreakthroughDist::point(number(j, "t"));
    if (k == "atoms") {
        if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ConfigError("\"atoms\" must be an array");
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
                throw ConfigError("each atom must be [t, p]");
            }
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        return BreakthroughDist::from_atoms(std::move(atoms));
    }
    const int m = integer_or(j, "m", 16);
    if (m < 1) throw ConfigError("\"m\" must be positive");
    if (k == "exponential") return BreakthroughDist::discretize(Exponential{number_or(j, "rate", 1.0)}, m);
    if (k == "weibull") {
        return BreakthroughDist::discretize(Weibull{number(j, "shape"), number_or(j, "scale", 1.0)}, m);
    }
    throw ConfigError("unknown distribution kind \"" + k + "\"");
}

Mechanism parse_mechanism(const Json& j, const TechnologyPair& pair) {
    const std::string k = kind(j);
    if (k == "deadline") {
        double T = kNoDeadline;
        if (j.contains("T")) {
            const Json& t = j.at("T");
            if (t.is_number()) {
                T = t.get<double>();
            } else if (!(t.is_null() || (t.is_string() && t.get<std::string>() == "inf"))) {
                throw ConfigError("deadline \"T\" must be a number, null or \"inf\"");
            }
        }
        return to_mechanism(DeadlineSpec::of(pair, T));
    }
    if (k == "step") {
        Mechanism m(numbers(j, "grid"), numbers(j, "levels"), pair.r);
        if (j.contains("reward")) m = m.with_constant_reward(numbers(j, "reward"));
        return m;
    }
    throw ConfigError("unknown mechanism kind \"" + k + "\"");
}

RunConfig parse_config(const Json& doc, const std::string& command, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    std::string cmd = command;
    if (cmd.empty() && doc.contains("command")) {
        if (!doc.at("command").is_string()) throw ConfigError("\"command\" must be a string");
        cmd = doc.at("command").get<std::string>();
    }
    if (cmd.empty()) throw ConfigError("no command given");
    if (!is_command(cmd)) throw ConfigError("unknown command \"" + cmd + "\"");

    try {
        const double r = number_or(doc, "r", 1.0);
        if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("\"r\" must be positive");
        if (!doc.contains("technology")) throw ConfigError("missing key \"technology\"");
        const Json& tech = doc.at("technology");
        std::optional<insurance::UiPrimitives> ui;
        auto pair = [&] {
            if (tech.is_object() && tech.contains("kind") && tech.at("kind") == "insurance") {
                ui = parse_ui(tech, r);
                return insurance::build_frontiers(*ui);
            }
            if (!tech.is_object() || !tech.contains("f0") || !tech.contains("f1")) {
                throw ConfigError("\"technology\" needs \"f0\" and \"f1\" or kind \"insurance\"");
            }
            return make_technology(parse_frontier(tech.at("f0")), parse_frontier(tech.at("f1")), r);
        }();
        RunConfig cfg{cmd, r, std::move(pair), ui, std::nullopt, std::nullopt, Json::object(), {}, base_dir};
        if (doc.contains("distribution")) cfg.dist = parse_distribution(doc.at("distribution"));
        if (doc.contains("distribution_dag")) cfg.dist_dag = parse_distribution(doc.at("distribution_dag"));
        if (doc.contains("options")) {
            if (!doc.at("options").is_object()) throw ConfigError("\"options\" must be an object");
            cfg.options = doc.at("options");
        }
        if (doc.contains("tolerances")) {
            const Json& t = doc.at("tolerances");
            cfg.tol.root = number_or(t, "root", cfg.tol.root);
            cfg.tol.residual = number_or(t, "residual", cfg.tol.residual);
            cfg.tol.payoff = number_or(t, "payoff", cfg.tol.payoff);
        }
        if (!(cfg.tol.root > 0.0 && cfg.tol.residual > 0.0 && cfg.tol.payoff > 0.0)) {
            throw ConfigError("tolerances must be positive");
        }
        return cfg;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, command, path.parent_path());
}

}  // namespace screening::cli
