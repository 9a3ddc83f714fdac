#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tailex::cli {

// Exit codes: 2 usage, 3 missing config, 4 schema violation, 5 solver
// non-convergence, 6 I/O failure.
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMissingConfig = 3;
inline constexpr int kExitSchema = 4;
inline constexpr int kExitSolver = 5;
inline constexpr int kExitIo = 6;

enum class Verb { exact, limit, estimate, simulate, sweep, boxplot };

struct Command {
    Verb verb = Verb::exact;
    std::string config_path;
    std::string output_path; // empty: stdout
    std::vector<std::pair<std::string, std::string>> overrides; // --set k=v
    std::optional<std::uint64_t> seed; // --seed overrides master_seed
    unsigned jobs = 1;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws UsageError on unknown verbs/flags or a missing required flag.
Command parse_command(int argc, const char* const* argv);

// Executes the command; returns the process exit code and writes outputs.
int run_command(const Command& cmd);

} // namespace tailex::cli
