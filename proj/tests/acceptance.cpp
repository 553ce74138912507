// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.

#include "oracles/stats_oracle.hpp"
#include "test_support.hpp"

#include "freqbench/bench.hpp"
#include "freqbench/cli.hpp"
#include "freqbench/error.hpp"
#include "freqbench/stats.hpp"
#include "freqbench/synth.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

using namespace freqbench;
using namespace freqbench::testing;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Result {
    Verdict verdict = Verdict::Pass;
    std::string detail;
};

/// Collects failure messages; the criterion passes when none were recorded.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++count_;
    }
    Result result(std::string detail) const {
        if (count_ == 0) return {Verdict::Pass, std::move(detail)};
        std::string msg = std::to_string(count_) + " failure(s): ";
        for (std::size_t i = 0; i < failures_.size(); ++i) msg += (i ? "; " : "") + failures_[i];
        return {Verdict::Fail, msg};
    }

private:
    std::vector<std::string> failures_;
    std::size_t count_ = 0;
};

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

bool close_rel(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

// Criteria 1 and 2 share the same randomized corpus.
struct EquivalenceRun {
    std::size_t datasets = 0;
    std::size_t tables = 0;
    double seconds = 0.0;
    Check equivalence;
    Check conservation;
};

EquivalenceRun run_equivalence() {
    EquivalenceRun run;
    std::mt19937_64 rng(20240601);
    const auto start = std::chrono::steady_clock::now();
    std::uniform_int_distribution<std::size_t> workers(1, 8);
    for (int d = 0; d < 200; ++d) {
        const auto ds = random_dataset(rng, 10000, 9);
        const auto names = ds.schema().names();
        const auto rows = ds.row_count();
        std::uniform_int_distribution<std::size_t> chunk(1, rows + 10);
        const std::vector<ExecutionStrategy> strategies{
            Sequential{},
            PerAttribute{workers(rng)},
            RowChunks{workers(rng), d % 3 == 0 ? std::nullopt : std::optional<std::size_t>(chunk(rng))},
            Hybrid{workers(rng), workers(rng), d % 4 == 0 ? std::nullopt : std::optional<std::size_t>(chunk(rng))},
        };
        const auto sequential = count_many(ds, names, Sequential{});
        const auto expected = to_json(sequential);
        for (std::size_t a = 0; a < names.size(); ++a) {
            run.equivalence.expect(as_map(sequential[a]) == oracle_counts(ds.column_at(a)),
                                   "dataset " + std::to_string(d) + ": sequential differs from map oracle");
        }
        for (const auto& s : strategies) {
            const auto tables = count_many(ds, names, s);
            run.equivalence.expect(to_json(tables) == expected, "dataset " + std::to_string(d) + ": " + describe(s));
            for (const auto& t : tables) {
                std::uint64_t sum = 0;
                for (const auto& [value, n] : t.counts()) sum += n;
                run.conservation.expect(sum == rows, "dataset " + std::to_string(d) + " " + t.attribute() + " under " +
                                                         describe(s));
                ++run.tables;
            }
        }
        ++run.datasets;
    }
    run.seconds = elapsed_since(start);
    run.equivalence.expect(run.seconds < 60.0, "runtime " + fmt("%.1f s", run.seconds) + " exceeds 60 s");
    return run;
}

Result criterion_3() {
    Check check;
    double worst = 0.0;
    for (const auto& c : oracle::kWelchOracle) {
        const auto r = welch_t_test(c.a, c.b, 0.05);
        const double dt = std::fabs(r.t_statistic - c.t);
        const double ddf = std::fabs(r.degrees_of_freedom - c.df);
        const double dp = std::fabs(r.p_value - c.p);
        if (std::isfinite(c.t)) worst = std::max({worst, dt, ddf, dp});
        check.expect(close_rel(r.t_statistic, c.t, 1e-9), "t " + fmt("%.17g", r.t_statistic));
        check.expect(close_rel(r.degrees_of_freedom, c.df, 1e-9), "df " + fmt("%.17g", r.degrees_of_freedom));
        check.expect(dp <= 1e-9, "p " + fmt("%.17g", r.p_value));
    }
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    const auto named = welch_t_test(a, b, 0.05);
    check.expect(std::fabs(named.t_statistic + 3.674) < 5e-4, "[1,2,3] vs [4,5,6] t");
    check.expect(std::fabs(named.degrees_of_freedom - 4.0) < 1e-12, "[1,2,3] vs [4,5,6] df");
    return check.result(std::to_string(oracle::kWelchOracle.size()) + " oracle cases, max abs deviation " +
                        fmt("%.3g", worst));
}

std::vector<TrialTiming> replay_timings(double baseline_mean, double optimized_mean) {
    const std::vector<double> offsets{-0.10, 0.10, -0.05, 0.05, 0.0};
    std::vector<TrialTiming> out;
    std::size_t seq = 0;
    for (Arm arm : {Arm::Baseline, Arm::Optimized}) {
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            TrialTiming t;
            t.arm = arm;
            t.strategy = arm == Arm::Baseline ? ExecutionStrategy{Sequential{}} : ExecutionStrategy{PerAttribute{9}};
            t.attributes = {"sex"};
            t.wall_seconds = (arm == Arm::Baseline ? baseline_mean : optimized_mean) + offsets[i];
            t.counts_digest = "fixture";
            t.trial_index = i + 1;
            t.sequence = ++seq;
            out.push_back(std::move(t));
        }
    }
    return out;
}

Result criterion_4() {
    Check check;
    const double pct = improvement_pct(42.55872547, 16.56789342);
    check.expect(std::fabs(pct - 61.07) < 0.005, "improvement " + fmt("%.6f", pct));
    check.expect(pct > 60.0 && pct < 65.0, "improvement outside the 60-65% band");
    const auto suite = analyze_trials(replay_timings(42.55872547, 16.56789342), PerAttribute{9}, 5, 0.05);
    check.expect(close_rel(suite.baseline_mean_s, 42.55872547, 1e-12), "replayed baseline mean");
    check.expect(close_rel(suite.optimized_mean_s, 16.56789342, 1e-12), "replayed optimized mean");
    check.expect(suite.means_test.alpha == 0.05, "alpha");
    check.expect(suite.means_test.reject_null, "replayed suite does not reject");
    return check.result("improvement " + fmt("%.4f%%", pct) + ", replay p = " + fmt("%.3g", suite.means_test.p_value) +
                        ", reject_null = " + (suite.means_test.reject_null ? "true" : "false"));
}

Result criterion_5() {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    const auto ds = generate(default_vitals_spec(500000, 42));
    const auto tables = count_many(ds, std::vector<std::string>{"sex", "vital_event"}, Sequential{});
    const double seconds = elapsed_since(start);
    const std::vector<std::pair<std::string, double>> expected_sex{
        {"male", 44.16}, {"female", 43.36}, {"not_applicable", 12.48}};
    const std::vector<std::pair<std::string, double>> expected_event{
        {"birth", 61.54}, {"death", 25.98}, {"marriage", 12.48}};
    double worst = 0.0;
    auto compare = [&](const FrequencyTable& t, const std::vector<std::pair<std::string, double>>& expected) {
        for (const auto& [value, pct] : expected) {
            const double observed = 100.0 * static_cast<double>(t.count(value)) / 500000.0;
            worst = std::max(worst, std::fabs(observed - pct));
            check.expect(std::fabs(observed - pct) <= 0.5, t.attribute() + "=" + value + " " + fmt("%.3f%%", observed));
        }
    };
    compare(tables[0], expected_sex);
    compare(tables[1], expected_event);
    check.expect(seconds < 30.0, "runtime " + fmt("%.1f s", seconds));
    return check.result("max deviation " + fmt("%.3f pp", worst) + ", " + fmt("%.2f s", seconds));
}

Result criterion_6() {
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw < 4) {
        return {Verdict::Skip, "host reports " + std::to_string(hw) + " hardware thread(s); needs at least 4"};
    }
    Check check;
    const auto ds = generate(default_vitals_spec(500000, 42));
    const auto names = ds.schema().names();
    SuiteOptions options;
    options.optimized = default_per_attribute(names.size());
    options.runs = 5;
    const auto cumulative = run_cumulative_suite(ds, names, options);
    const auto trials = run_trial_suite(ds, names, options);
    const auto report =
        assemble_report(dataset_summary(ds), 0.05, cumulative, trials, current_environment());
    const auto test = report.means_test();

    check.expect(cumulative.optimized_mean_s < cumulative.baseline_mean_s, "cumulative optimized mean >= baseline");
    check.expect(trials.optimized_mean_s < trials.baseline_mean_s, "trial optimized mean >= baseline");
    check.expect(test && test->reject_null, "means test does not reject at alpha 0.05");

    std::string detail = "cumulative " + fmt("%.2f%%", cumulative.improvement_pct_of_means) + ", k=1 " +
                         fmt("%.2f%%", cumulative.levels.front().improvement_pct) + ", k=9 " +
                         fmt("%.2f%%", cumulative.levels.back().improvement_pct) + ", trials mean " +
                         fmt("%.2f%%", trials.mean_improvement_pct);
    return check.result(detail);
}

Result criterion_7() {
    Check check;
    std::size_t reports = 0;
    auto inspect = [&](const BenchmarkReport& report, const std::string& label) {
        ++reports;
        const auto text = report_to_json(report);
        const auto problems = verify_report(text);
        check.expect(problems.empty(), label + ": " + (problems.empty() ? "" : problems.front()));
        check.expect(report_to_json(report_from_json(text)) == text, label + ": round trip differs");

        auto other = report;
        other.environment = Environment{report.environment.hardware_threads + 7, "1970-01-01T00:00:00Z"};
        auto a = nlohmann::json::parse(text);
        auto b = nlohmann::json::parse(report_to_json(report_from_json(report_to_json(other))));
        a.erase("environment");
        b.erase("environment");
        check.expect(a.dump(2) == b.dump(2), label + ": differs outside the environment block");

        auto tampered = nlohmann::json::parse(text);
        auto& suite = tampered["trial_suite"].is_null() ? tampered["cumulative_suite"] : tampered["trial_suite"];
        suite["improvement_pct_of_means"] = suite["improvement_pct_of_means"].get<double>() * (1 + 1e-9);
        check.expect(!verify_report(tampered.dump(2)).empty(), label + ": tampering not detected");
    };

    const auto fixture = six_row_fixture();
    const std::vector<std::string> sex{"sex", "event"};
    SuiteOptions options;
    options.optimized = RowChunks{2, 2};
    options.runs = 3;
    inspect(assemble_report(dataset_summary(fixture), 0.05, run_cumulative_suite(fixture, sex, options),
                            run_trial_suite(fixture, sex, options), current_environment()),
            "fixture report");

    const auto ds = generate(default_vitals_spec(20000, 7));
    const auto names = ds.schema().names();
    options.optimized = Hybrid{3, 2, std::nullopt};
    options.runs = 2;
    inspect(assemble_report(dataset_summary(ds), 0.05, run_cumulative_suite(ds, names, options), std::nullopt,
                            current_environment()),
            "cumulative-only report");
    inspect(assemble_report(DatasetSummary{1, {"sex"}}, 0.05, std::nullopt,
                            analyze_trials(replay_timings(42.55872547, 16.56789342), PerAttribute{9}, 5, 0.05),
                            current_environment()),
            "replayed report");
    return check.result(std::to_string(reports) + " reports recomputed within 1e-12 and round-tripped");
}

Result criterion_8() {
    Check check;
    TempDir dir;
    const auto six = dir.write("six.csv", kSixRowCsv).string();
    const auto bad = dir.write("bad.csv", "a,b\n1\n").string();
    const auto res = (dir / "res").string();
    auto run = [](const std::vector<std::string>& args, const cli::Hooks& hooks = {}) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err, hooks);
        return std::pair<int, std::string>(code, out.str());
    };
    const std::vector<std::pair<std::vector<std::string>, int>> table{
        {{"count", "--input", six}, 0},
        {{"gen", "--rows", "10", "--out", (dir / "g.csv").string()}, 0},
        {{"count", "--input", (dir / "missing.csv").string()}, 1},
        {{"count", "--input", bad}, 1},
        {{}, 2},
        {{"count", "--nope"}, 2},
        {{"count", "--input", six, "--attributes", "age"}, 2},
        {{"count", "--input", six, "--strategy", "magic"}, 2},
        {{"gen", "--rows", "0", "--out", (dir / "g.csv").string()}, 2},
        {{"bench", "--synthetic", "--rows", "50", "--trials", "1", "--out", res}, 2},
        {{"bench", "--synthetic", "--rows", "50", "--strategy", "sequential", "--out", res}, 2},
    };
    for (const auto& [args, code] : table) {
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        check.expect(run(args).first == code, "'" + joined + "' expected exit " + std::to_string(code));
    }

    const std::vector<std::pair<std::vector<std::string>, std::string>> pages{
        {{"--help"}, "help.txt"},
        {{"gen", "--help"}, "help_gen.txt"},
        {{"count", "--help"}, "help_count.txt"},
        {{"bench", "--help"}, "help_bench.txt"},
    };
    for (const auto& [args, file] : pages) {
        const auto [code, text] = run(args);
        check.expect(code == 0, file + ": exit code");
        check.expect(text == read_file(std::filesystem::path(FREQBENCH_GOLDEN_DIR) / file), file + ": differs");
    }

    cli::Hooks hooks;
    hooks.count = [](const Dataset& d, std::span<const std::string> names, const ExecutionStrategy& s) {
        auto tables = count_many(d, names, s);
        if (!std::holds_alternative<Sequential>(s)) tables.front().add("injected");
        return tables;
    };
    const int injected =
        run({"bench", "--synthetic", "--rows", "200", "--suite", "trials", "--trials", "2", "--out", res}, hooks).first;
    check.expect(injected == 3, "digest injection exited " + std::to_string(injected));
    return check.result(std::to_string(table.size()) + " exit-code cases, 4 help pages, digest injection exit 3");
}

Result guarded(const std::function<Result()>& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {Verdict::Fail, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main() {
    std::vector<std::pair<std::string, Result>> results;
    auto report = [&](int n, const std::string& name, Result r) {
        const char* tag = r.verdict == Verdict::Pass ? "PASS" : r.verdict == Verdict::Skip ? "SKIP" : "FAIL";
        std::cout << "criterion " << n << " [" << tag << "] " << name << ": " << r.detail << std::endl;
        results.emplace_back(name, std::move(r));
    };

    std::optional<EquivalenceRun> eq;
    try {
        eq = run_equivalence();
    } catch (const std::exception& e) {
        report(1, "strategy equivalence", {Verdict::Fail, std::string("exception: ") + e.what()});
        report(2, "conservation", {Verdict::Fail, "not run"});
    }
    if (eq) {
        report(1, "strategy equivalence",
               eq->equivalence.result(std::to_string(eq->datasets) + " datasets x 4 strategies, " +
                                      fmt("%.2f s", eq->seconds)));
        report(2, "conservation", eq->conservation.result(std::to_string(eq->tables) + " tables sum to row_count"));
    }
    report(3, "Welch t-test oracle", guarded(criterion_3));
    report(4, "reference means arithmetic", guarded(criterion_4));
    report(5, "generator fidelity", guarded(criterion_5));
    report(6, "speedup smoke test", guarded(criterion_6));
    report(7, "report integrity", guarded(criterion_7));
    report(8, "CLI contract", guarded(criterion_8));

    std::size_t failed = 0;
    for (const auto& [name, r] : results) failed += r.verdict == Verdict::Fail;
    std::cout << (failed == 0 ? "acceptance: all criteria passed or skipped" : "acceptance: " + std::to_string(failed) +
                                                                                  " criterion/criteria failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
