#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "screening/distribution.hpp"
#include "screening/frontier.hpp"
#include "screening/insurance.hpp"
#include "screening/mechanism.hpp"

namespace screening::cli {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration; maps to exit status 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double root = 1e-10;
    double residual = 1e-8;
    double payoff = 1e-9;
};

struct RunConfig {
    std::string command;
    double r = 1.0;
    TechnologyPair pair;
    std::optional<insurance::UiPrimitives> insurance;
    std::optional<BreakthroughDist> dist;
    std::optional<BreakthroughDist> dist_dag;
    Json options = Json::object();
    Tolerances tol;
    std::filesystem::path base_dir;  // relative paths in options resolve here
};

inline const char* const kCommands[] = {"analyze",         "solve-deadline", "solve-euler", "verify",
                                        "compare-statics", "ui-schedule",    "ui-sweep",    "oracle"};

bool is_command(const std::string& name);

Frontier parse_frontier(const Json& j);
BreakthroughDist parse_distribution(const Json& j);

/// {"kind":"deadline","T":...} (T may be null or "inf") or
/// {"kind":"step","grid":[...],"levels":[...],"reward":[...]}.
Mechanism parse_mechanism(const Json& j, const TechnologyPair& pair);

/// Builds a run from the parsed document. `command` overrides the document's
/// "command" key when non-empty. Throws ConfigError.
RunConfig parse_config(const Json& doc, const std::string& command = "",
                       const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path, const std::string& command = "");

}  // namespace screening::cli
