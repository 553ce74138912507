#pragma once

#include "freqbench/bench.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace freqbench::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kDataError = 1,
    kUsageError = 2,
    kCorrectnessFailure = 3,
};

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string spec;
    std::string out;
    std::string attributes = "all";
    std::string strategy;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> chunk;
    std::optional<std::size_t> chunk_workers;
    std::size_t trials = 5;
    std::size_t repeats = 5;
    std::string suite = "both";
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> rows;
    bool synthetic = false;
    std::string delimiter = ",";
    bool no_header = false;
};

/// Test seams; production runs use the defaults.
struct Hooks {
    /// Replaces the counting call of the benchmark's arms.
    CountFunction count;
};

/// Splits a comma list, trims entries, drops duplicates keeping the first
/// occurrence. "all" expands to `schema` order.
std::vector<std::string> resolve_attributes(const std::string& list, const AttributeSchema& schema);

/// Builds the strategy named by config.strategy (or `fallback` when empty)
/// for `attribute_count` requested attributes.
ExecutionStrategy make_strategy(const RunConfig& config, std::size_t attribute_count, std::string_view fallback);

int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_count(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

/// Parses arguments (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

} // namespace freqbench::cli
