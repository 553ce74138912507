#include "freqbench/bench.hpp"

#include "freqbench/digest.hpp"
#include "freqbench/error.hpp"

#include <algorithm>
#include <unordered_set>

namespace freqbench {

std::string_view to_string(Arm arm) noexcept {
    return arm == Arm::Baseline ? "baseline" : "optimized";
}

namespace {

std::string join(std::span<const std::string> names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ",";
        out += n;
    }
    return out;
}

void check_attributes(const Dataset& ds, std::span<const std::string> names) {
    if (names.empty()) {
        throw Error(ErrorKind::EmptyInput, "no attributes requested");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& n : names) {
        ds.schema().index_of(n);
        if (!seen.insert(n).second) {
            throw Error(ErrorKind::DuplicateAttribute, "attribute '" + n + "' requested more than once");
        }
    }
}

void check_optimized(const SuiteOptions& options) {
    validate(options.optimized);
    if (std::holds_alternative<Sequential>(options.optimized) && !options.allow_sequential_optimized) {
        throw Error(ErrorKind::StrategyIsSequential, "optimized arm must use a parallel strategy");
    }
}

/// Runs baseline then optimized arms on one attribute group and appends the
/// timings. Each run's digest must equal the first baseline digest.
class ArmRunner {
public:
    ArmRunner(const Dataset& ds, const SuiteOptions& options, std::vector<TrialTiming>& out)
        : ds_(ds), options_(options), out_(out) {}

    void run_group(const std::vector<std::string>& attrs) {
        std::string expected;
        run_arm(attrs, Arm::Baseline, Sequential{}, expected);
        run_arm(attrs, Arm::Optimized, options_.optimized, expected);
    }

private:
    void run_arm(const std::vector<std::string>& attrs, Arm arm, const ExecutionStrategy& strategy,
                 std::string& expected) {
        if (options_.warmup) {
            (void)options_.count(ds_, attrs, strategy);
        }
        for (std::size_t i = 1; i <= options_.runs; ++i) {
            // The clock covers only the counting call.
            auto [tables, seconds] = measure([&] { return options_.count(ds_, attrs, strategy); });
            TrialTiming t;
            t.arm = arm;
            t.strategy = strategy;
            t.attributes = attrs;
            t.wall_seconds = seconds;
            t.counts_digest = counts_digest(tables);
            t.trial_index = i;
            t.sequence = ++sequence_;
            if (expected.empty()) {
                expected = t.counts_digest;
            } else if (t.counts_digest != expected) {
                throw Error(ErrorKind::DigestMismatch, "counts digest mismatch for [" + join(attrs) + "] in " +
                                                           std::string(to_string(arm)) + " run " +
                                                           std::to_string(i) + " using " + describe(strategy));
            }
            out_.push_back(std::move(t));
        }
    }

    const Dataset& ds_;
    const SuiteOptions& options_;
    std::vector<TrialTiming>& out_;
    std::size_t sequence_ = 0;
};

struct Group {
    std::vector<std::string> attributes;
    std::vector<const TrialTiming*> baseline;
    std::vector<const TrialTiming*> optimized;
};

/// Groups timings by attribute list in first-appearance order and checks
/// that each (group, arm) holds exactly `runs` timings with one digest.
std::vector<Group> group_timings(const std::vector<TrialTiming>& timings, std::size_t runs) {
    if (timings.empty()) {
        throw Error(ErrorKind::InconsistentInputs, "no timings recorded");
    }
    std::vector<Group> groups;
    for (const auto& t : timings) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return g.attributes == t.attributes; });
        if (it == groups.end()) {
            groups.push_back({t.attributes, {}, {}});
            it = std::prev(groups.end());
        }
        (t.arm == Arm::Baseline ? it->baseline : it->optimized).push_back(&t);
    }
    for (auto& g : groups) {
        const std::string label = "[" + join(g.attributes) + "]";
        if (g.baseline.size() != runs || g.optimized.size() != runs) {
            throw Error(ErrorKind::InconsistentInputs,
                        "group " + label + " has " + std::to_string(g.baseline.size()) + " baseline and " +
                            std::to_string(g.optimized.size()) + " optimized timings, expected " +
                            std::to_string(runs) + " each");
        }
        auto by_index = [](const TrialTiming* a, const TrialTiming* b) { return a->trial_index < b->trial_index; };
        std::stable_sort(g.baseline.begin(), g.baseline.end(), by_index);
        std::stable_sort(g.optimized.begin(), g.optimized.end(), by_index);
        const std::string& digest = g.baseline.front()->counts_digest;
        for (const auto* arm : {&g.baseline, &g.optimized}) {
            for (const auto* t : *arm) {
                if (t->counts_digest != digest) {
                    throw Error(ErrorKind::DigestMismatch, "counts digest mismatch within group " + label);
                }
            }
        }
    }
    return groups;
}

double mean_seconds(const std::vector<const TrialTiming*>& ts) {
    double sum = 0.0;
    for (const auto* t : ts) sum += t->wall_seconds;
    return sum / static_cast<double>(ts.size());
}

std::vector<double> arm_seconds(const std::vector<TrialTiming>& timings, Arm arm) {
    std::vector<double> out;
    for (const auto& t : timings) {
        if (t.arm == arm) out.push_back(t.wall_seconds);
    }
    return out;
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

} // namespace

// ---------------------------------------------------------------------------

CumulativeSuite analyze_cumulative(std::vector<TrialTiming> timings, const ExecutionStrategy& optimized,
                                   std::size_t repeats, double alpha) {
    if (repeats == 0) {
        throw Error(ErrorKind::InconsistentInputs, "repeats must be at least 1");
    }
    CumulativeSuite suite;
    suite.optimized = optimized;
    suite.repeats = repeats;
    suite.timings = std::move(timings);

    const auto groups = group_timings(suite.timings, repeats);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.attributes.size() != i + 1 ||
            (i > 0 && !std::equal(groups[i - 1].attributes.begin(), groups[i - 1].attributes.end(),
                                  g.attributes.begin()))) {
            throw Error(ErrorKind::InconsistentInputs,
                        "cumulative levels must be successive attribute prefixes (level " + std::to_string(i + 1) +
                            " is [" + join(g.attributes) + "])");
        }
        CumulativeLevel level;
        level.k = i + 1;
        level.attributes = g.attributes;
        level.baseline_mean_s = mean_seconds(g.baseline);
        level.optimized_mean_s = mean_seconds(g.optimized);
        level.improvement_pct = improvement_pct(level.baseline_mean_s, level.optimized_mean_s);
        level.counts_digest = g.baseline.front()->counts_digest;
        suite.levels.push_back(std::move(level));
    }

    const auto base = arm_seconds(suite.timings, Arm::Baseline);
    const auto opt = arm_seconds(suite.timings, Arm::Optimized);
    suite.baseline_mean_s = mean_of(base);
    suite.optimized_mean_s = mean_of(opt);
    suite.improvement_pct_of_means = improvement_pct(suite.baseline_mean_s, suite.optimized_mean_s);
    if (base.size() >= 2 && opt.size() >= 2) {
        suite.means_test = welch_t_test(base, opt, alpha);
    }
    return suite;
}

TrialSuite analyze_trials(std::vector<TrialTiming> timings, const ExecutionStrategy& optimized, std::size_t trials,
                          double alpha) {
    if (trials < 2) {
        throw Error(ErrorKind::InsufficientTrials, "trial suite needs at least 2 trials per arm, got " +
                                                       std::to_string(trials));
    }
    TrialSuite suite;
    suite.optimized = optimized;
    suite.trials = trials;
    suite.timings = std::move(timings);

    const auto groups = group_timings(suite.timings, trials);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& g : groups) {
        if (g.attributes.size() != 1) {
            throw Error(ErrorKind::InconsistentInputs,
                        "trial suite timings must cover one attribute each, got [" + join(g.attributes) + "]");
        }
        TrialAttributeSummary s;
        s.attribute = g.attributes.front();
        s.baseline_mean_s = mean_seconds(g.baseline);
        s.optimized_mean_s = mean_seconds(g.optimized);
        s.improvement_pct = improvement_pct(s.baseline_mean_s, s.optimized_mean_s);
        s.counts_digest = g.baseline.front()->counts_digest;
        suite.per_attribute.push_back(std::move(s));
        for (std::size_t i = 0; i < trials; ++i) {
            pairs.emplace_back(g.baseline[i]->wall_seconds, g.optimized[i]->wall_seconds);
        }
    }

    const auto base = arm_seconds(suite.timings, Arm::Baseline);
    const auto opt = arm_seconds(suite.timings, Arm::Optimized);
    suite.baseline_mean_s = mean_of(base);
    suite.optimized_mean_s = mean_of(opt);
    suite.mean_improvement_pct = mean_improvement(pairs);
    suite.improvement_pct_of_means = improvement_pct(suite.baseline_mean_s, suite.optimized_mean_s);
    suite.means_test = welch_t_test(base, opt, alpha);
    return suite;
}

CumulativeSuite run_cumulative_suite(const Dataset& ds, std::span<const std::string> ordered_attrs,
                                     const SuiteOptions& options) {
    check_attributes(ds, ordered_attrs);
    check_optimized(options);
    if (options.runs == 0) {
        throw Error(ErrorKind::InconsistentInputs, "repeats must be at least 1");
    }
    std::vector<TrialTiming> timings;
    ArmRunner runner(ds, options, timings);
    for (std::size_t k = 1; k <= ordered_attrs.size(); ++k) {
        runner.run_group(std::vector<std::string>(ordered_attrs.begin(), ordered_attrs.begin() + static_cast<std::ptrdiff_t>(k)));
    }
    return analyze_cumulative(std::move(timings), options.optimized, options.runs, options.alpha);
}

TrialSuite run_trial_suite(const Dataset& ds, std::span<const std::string> single_attrs,
                           const SuiteOptions& options) {
    check_attributes(ds, single_attrs);
    check_optimized(options);
    if (options.runs < 2) {
        throw Error(ErrorKind::InsufficientTrials, "trial suite needs at least 2 trials per arm, got " +
                                                       std::to_string(options.runs));
    }
    std::vector<TrialTiming> timings;
    ArmRunner runner(ds, options, timings);
    for (const auto& attr : single_attrs) {
        runner.run_group({attr});
    }
    return analyze_trials(std::move(timings), options.optimized, options.runs, options.alpha);
}

} // namespace freqbench
