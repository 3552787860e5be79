#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "screening_cli/config.hpp"

namespace screening::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kAssumptionFailure = 2, kSolverError = 3 };

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    int exit_code = kOk;
    Json report;
    std::vector<OutputFile> files;  // report.json is always first
};

/// Runs one command without touching the filesystem (except reading a
/// mechanism file named in the options).
RunResult execute(const RunConfig& cfg);

/// Writes every file into `dir` through temporaries and renames, so a failed
/// run leaves no partial output.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

/// Entry point of the `screen` binary.
int main_entry(int argc, char** argv);

}  // namespace screening::cli
