#pragma once

#include "freqbench/counter.hpp"
#include "freqbench/dataset.hpp"
#include "freqbench/stats.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace freqbench {

inline constexpr std::string_view kReportSchemaVersion = "freqbench-report/1";

/// Runs `work` once and returns its result with the elapsed monotonic time in
/// seconds. Only the call itself is timed.
template <class Work>
auto measure(Work&& work) {
    using Clock = std::chrono::steady_clock;
    using Result = std::invoke_result_t<Work>;
    if constexpr (std::is_void_v<Result>) {
        const auto start = Clock::now();
        std::forward<Work>(work)();
        const auto stop = Clock::now();
        return std::chrono::duration<double>(stop - start).count();
    } else {
        const auto start = Clock::now();
        Result result = std::forward<Work>(work)();
        const auto stop = Clock::now();
        return std::pair<Result, double>(std::move(result), std::chrono::duration<double>(stop - start).count());
    }
}

enum class Arm { Baseline, Optimized };

std::string_view to_string(Arm arm) noexcept;

/// One timed counting run.
struct TrialTiming {
    Arm arm = Arm::Baseline;
    ExecutionStrategy strategy;
    std::vector<std::string> attributes;
    double wall_seconds = 0.0;
    std::string counts_digest;
    /// 1-based repetition number within its (attributes, arm) group.
    std::size_t trial_index = 1;
    /// 1-based position in the order runs were executed.
    std::size_t sequence = 1;

    friend bool operator==(const TrialTiming&, const TrialTiming&) = default;
};

/// Counting entry point used by the harness. Defaults to count_many; tests
/// substitute it to exercise the digest guard.
using CountFunction = std::function<std::vector<FrequencyTable>(const Dataset&, std::span<const std::string>,
                                                                const ExecutionStrategy&)>;

struct SuiteOptions {
    ExecutionStrategy optimized = PerAttribute{1};
    /// Timed runs per arm and per level (cumulative) or attribute (trials).
    std::size_t runs = 5;
    double alpha = 0.05;
    /// One untimed run before each timed arm.
    bool warmup = true;
    /// Lets a harness run the optimized arm as Sequential for null-case checks.
    bool allow_sequential_optimized = false;
    CountFunction count = count_many;
};

struct CumulativeLevel {
    std::size_t k = 0;
    std::vector<std::string> attributes;
    double baseline_mean_s = 0.0;
    double optimized_mean_s = 0.0;
    double improvement_pct = 0.0;
    std::string counts_digest;

    friend bool operator==(const CumulativeLevel&, const CumulativeLevel&) = default;
};

struct CumulativeSuite {
    ExecutionStrategy optimized;
    std::size_t repeats = 0;
    std::vector<TrialTiming> timings;
    std::vector<CumulativeLevel> levels;
    double baseline_mean_s = 0.0;
    double optimized_mean_s = 0.0;
    double improvement_pct_of_means = 0.0;
    /// Absent when either arm has fewer than two timings.
    std::optional<MeansTestResult> means_test;
};

struct TrialAttributeSummary {
    std::string attribute;
    double baseline_mean_s = 0.0;
    double optimized_mean_s = 0.0;
    double improvement_pct = 0.0;
    std::string counts_digest;

    friend bool operator==(const TrialAttributeSummary&, const TrialAttributeSummary&) = default;
};

struct TrialSuite {
    ExecutionStrategy optimized;
    std::size_t trials = 0;
    std::vector<TrialTiming> timings;
    std::vector<TrialAttributeSummary> per_attribute;
    double baseline_mean_s = 0.0;
    double optimized_mean_s = 0.0;
    /// Mean of per-(attribute, trial) improvement percentages.
    double mean_improvement_pct = 0.0;
    /// improvement_pct of the two overall means.
    double improvement_pct_of_means = 0.0;
    MeansTestResult means_test;
};

/// Times Sequential against `options.optimized` on every prefix of
/// `ordered_attrs`, `options.runs` times per arm.
/// Throws StrategyIsSequential, DigestMismatch, or any counter error.
CumulativeSuite run_cumulative_suite(const Dataset& ds, std::span<const std::string> ordered_attrs,
                                     const SuiteOptions& options);

/// Times Sequential against `options.optimized` on each attribute alone,
/// `options.runs` times per arm. Throws InsufficientTrials when runs < 2.
TrialSuite run_trial_suite(const Dataset& ds, std::span<const std::string> single_attrs,
                           const SuiteOptions& options);

/// Rebuilds every derived number of a suite from raw timings.
/// Throws InconsistentInputs for missing arms or groups, DigestMismatch when
/// digests within a group differ.
CumulativeSuite analyze_cumulative(std::vector<TrialTiming> timings, const ExecutionStrategy& optimized,
                                   std::size_t repeats, double alpha);
TrialSuite analyze_trials(std::vector<TrialTiming> timings, const ExecutionStrategy& optimized,
                          std::size_t trials, double alpha);

// ---------------------------------------------------------------------------
// Report

struct DatasetSummary {
    std::size_t row_count = 0;
    std::vector<std::string> attributes;
    friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

DatasetSummary dataset_summary(const Dataset& ds);

/// The only nondeterministic part of a report.
struct Environment {
    std::size_t hardware_threads = 0;
    std::string timestamp;
};

Environment current_environment();

struct BenchmarkReport {
    DatasetSummary dataset;
    double alpha = 0.05;
    std::optional<CumulativeSuite> cumulative;
    std::optional<TrialSuite> trials;
    Environment environment;

    /// The trial suite's test when present, otherwise the cumulative suite's.
    std::optional<MeansTestResult> means_test() const;
};

/// Validates that every suite is non-empty and its derived numbers match
/// its raw timings, and that the suites only use dataset attributes.
/// Throws InconsistentInputs.
BenchmarkReport assemble_report(DatasetSummary dataset, double alpha, std::optional<CumulativeSuite> cumulative,
                                std::optional<TrialSuite> trials, Environment environment);

/// Pretty-printed JSON with sorted keys and a trailing newline.
std::string report_to_json(const BenchmarkReport& report);
/// Reads a report as stored, without recomputation. Throws InconsistentInputs.
BenchmarkReport report_from_json(std::string_view text);

/// Recomputes every derived number in a serialized report from its raw
/// timings; returns a description of each mismatch (relative tolerance 1e-12).
std::vector<std::string> verify_report(std::string_view text);

/// k,baseline_s,optimized_s,improvement_pct
std::string cumulative_csv(const BenchmarkReport& report);
/// attribute,trial,arm,seconds
std::string trials_csv(const BenchmarkReport& report);

/// Writes report.json, cumulative.csv and trials.csv into `dir`.
void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir);

} // namespace freqbench
