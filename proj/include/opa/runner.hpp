#ifndef OPA_RUNNER_HPP
#define OPA_RUNNER_HPP

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "opa/config.hpp"

namespace opa {

/// Process exit codes of the scenario runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitDivergence = 3,
    kExitResource = 4,
    kExitIo = 5,
    kExitInvariant = 6,
};

struct RunOptions {
    std::filesystem::path output_dir = ".";
};

struct RunReport {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
    /// Invariant diagnostics that crossed their threshold.
    std::vector<std::string> violations;
    /// Human-readable summary block, one `key: value` per line.
    std::string summary;
};

/// Runs one scenario and writes its CSV artifacts (each via a temporary file
/// renamed into place). Library errors propagate as exceptions; see
/// exit_code_for.
RunReport run(const RunConfig& config, const RunOptions& options = {});

/// Maps an exception raised by parse_config or run to a process exit code.
int exit_code_for(const std::exception& error);

/// Renders a double the way every CSV artifact does (17 significant digits).
std::string format_number(double value);

} // namespace opa

#endif // OPA_RUNNER_HPP
