#include <iostream>

#include <CLI11.hpp>

#include "screening_cli/run.hpp"

namespace screening::cli {

namespace {

std::string usage() {
    std::string s = "usage: screen <command> --config PATH [--out DIR] [--tol-root X] [--tol-residual X]\ncommands:";
    for (const char* c : kCommands) s += std::string(" ") + c;
    return s + "\n";
}

}  // namespace

int main_entry(int argc, char** argv) {
    CLI::App app{"Disclosure-incentive mechanism solver"};
    std::string command;
    std::string config;
    std::string out_dir = ".";
    std::optional<double> tol_root;
    std::optional<double> tol_residual;
    std::optional<double> tol_payoff;
    app.add_option("command", command, "analyze | solve-deadline | solve-euler | verify | compare-statics | "
                                       "ui-schedule | ui-sweep | oracle");
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--tol-root", tol_root, "root-finding tolerance");
    app.add_option("--tol-residual", tol_residual, "residual acceptance tolerance");
    app.add_option("--tol-payoff", tol_payoff, "payoff comparison tolerance");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << usage();
        return kConfigError;
    }
    if (!command.empty() && !is_command(command)) {
        std::cerr << "unknown command \"" << command << "\"\n" << usage();
        return kConfigError;
    }

    RunResult result;
    try {
        RunConfig cfg = load_config(config, command);
        if (tol_root) cfg.tol.root = *tol_root;
        if (tol_residual) cfg.tol.residual = *tol_residual;
        if (tol_payoff) cfg.tol.payoff = *tol_payoff;
        if (!(cfg.tol.root > 0.0 && cfg.tol.residual > 0.0 && cfg.tol.payoff > 0.0)) {
            throw ConfigError("tolerances must be positive");
        }
        result = execute(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n' << usage();
        return kConfigError;
    }
    try {
        write_outputs(out_dir, result.files);
    } catch (const std::exception& e) {
        std::cerr << "cannot write outputs: " << e.what() << '\n';
        return kConfigError;
    }
    if (result.exit_code != kOk && result.report.contains("error")) {
        std::cerr << result.report["error"].get<std::string>() << '\n';
    }
    return result.exit_code;
}

}  // namespace screening::cli
