#include "freqbench/bench.hpp"

#include "freqbench/error.hpp"
#include "freqbench/synth.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

namespace freqbench {

using nlohmann::json;

namespace {

[[noreturn]] void inconsistent(const std::string& what) {
    throw Error(ErrorKind::InconsistentInputs, what);
}

// JSON has no infinities; a degenerate means test can produce one.
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "NaN";
    return v > 0 ? "Infinity" : "-Infinity";
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    inconsistent("expected a number, got '" + s + "'");
}

json optional_size(const std::optional<std::size_t>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> optional_size_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::size_t>();
}

json strategy_json(const ExecutionStrategy& s) {
    json j;
    j["kind"] = strategy_name(s);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PerAttribute>) {
                j["max_workers"] = v.max_workers;
            } else if constexpr (std::is_same_v<T, RowChunks>) {
                j["workers"] = v.workers;
                j["chunk"] = optional_size(v.chunk);
            } else if constexpr (std::is_same_v<T, Hybrid>) {
                j["attribute_workers"] = v.attribute_workers;
                j["chunk_workers"] = v.chunk_workers;
                j["chunk"] = optional_size(v.chunk);
            }
        },
        s);
    return j;
}

ExecutionStrategy strategy_from(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "sequential") return Sequential{};
    if (kind == "per-attribute") return PerAttribute{j.at("max_workers").get<std::size_t>()};
    if (kind == "row-chunks") return RowChunks{j.at("workers").get<std::size_t>(), optional_size_from(j.at("chunk"))};
    if (kind == "hybrid") {
        return Hybrid{j.at("attribute_workers").get<std::size_t>(), j.at("chunk_workers").get<std::size_t>(),
                      optional_size_from(j.at("chunk"))};
    }
    inconsistent("unknown strategy kind '" + kind + "'");
}

json timing_json(const TrialTiming& t) {
    return {{"arm", to_string(t.arm)},
            {"attributes", t.attributes},
            {"counts_digest", t.counts_digest},
            {"sequence", t.sequence},
            {"strategy", strategy_json(t.strategy)},
            {"trial_index", t.trial_index},
            {"wall_seconds", t.wall_seconds}};
}

TrialTiming timing_from(const json& j) {
    TrialTiming t;
    const auto arm = j.at("arm").get<std::string>();
    if (arm == "baseline") {
        t.arm = Arm::Baseline;
    } else if (arm == "optimized") {
        t.arm = Arm::Optimized;
    } else {
        inconsistent("unknown arm '" + arm + "'");
    }
    t.attributes = j.at("attributes").get<std::vector<std::string>>();
    t.counts_digest = j.at("counts_digest").get<std::string>();
    t.sequence = j.at("sequence").get<std::size_t>();
    t.strategy = strategy_from(j.at("strategy"));
    t.trial_index = j.at("trial_index").get<std::size_t>();
    t.wall_seconds = j.at("wall_seconds").get<double>();
    if (!(t.wall_seconds >= 0.0)) inconsistent("negative wall_seconds in timing");
    return t;
}

json means_test_json(const std::optional<MeansTestResult>& m) {
    if (!m) return nullptr;
    return {{"alpha", m->alpha},
            {"degrees_of_freedom", number(m->degrees_of_freedom)},
            {"p_value", number(m->p_value)},
            {"reject_null", m->reject_null},
            {"t_statistic", number(m->t_statistic)},
            {"test", "welch-two-sided"}};
}

std::optional<MeansTestResult> means_test_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    MeansTestResult m;
    m.alpha = j.at("alpha").get<double>();
    m.degrees_of_freedom = number_from(j.at("degrees_of_freedom"));
    m.p_value = number_from(j.at("p_value"));
    m.reject_null = j.at("reject_null").get<bool>();
    m.t_statistic = number_from(j.at("t_statistic"));
    return m;
}

json cumulative_json(const CumulativeSuite& s) {
    json levels = json::array();
    for (const auto& l : s.levels) {
        levels.push_back({{"attributes", l.attributes},
                          {"baseline_mean_s", l.baseline_mean_s},
                          {"counts_digest", l.counts_digest},
                          {"improvement_pct", l.improvement_pct},
                          {"k", l.k},
                          {"optimized_mean_s", l.optimized_mean_s}});
    }
    json timings = json::array();
    for (const auto& t : s.timings) timings.push_back(timing_json(t));
    return {{"baseline_mean_s", s.baseline_mean_s},
            {"improvement_pct_of_means", s.improvement_pct_of_means},
            {"levels", std::move(levels)},
            {"means_test", means_test_json(s.means_test)},
            {"optimized_mean_s", s.optimized_mean_s},
            {"optimized_strategy", strategy_json(s.optimized)},
            {"repeats", s.repeats},
            {"timings", std::move(timings)}};
}

CumulativeSuite cumulative_from(const json& j) {
    CumulativeSuite s;
    s.baseline_mean_s = j.at("baseline_mean_s").get<double>();
    s.improvement_pct_of_means = j.at("improvement_pct_of_means").get<double>();
    for (const auto& l : j.at("levels")) {
        CumulativeLevel level;
        level.attributes = l.at("attributes").get<std::vector<std::string>>();
        level.baseline_mean_s = l.at("baseline_mean_s").get<double>();
        level.counts_digest = l.at("counts_digest").get<std::string>();
        level.improvement_pct = l.at("improvement_pct").get<double>();
        level.k = l.at("k").get<std::size_t>();
        level.optimized_mean_s = l.at("optimized_mean_s").get<double>();
        s.levels.push_back(std::move(level));
    }
    s.means_test = means_test_from(j.at("means_test"));
    s.optimized_mean_s = j.at("optimized_mean_s").get<double>();
    s.optimized = strategy_from(j.at("optimized_strategy"));
    s.repeats = j.at("repeats").get<std::size_t>();
    for (const auto& t : j.at("timings")) s.timings.push_back(timing_from(t));
    return s;
}

json trials_json(const TrialSuite& s) {
    json per_attribute = json::array();
    for (const auto& a : s.per_attribute) {
        per_attribute.push_back({{"attribute", a.attribute},
                                 {"baseline_mean_s", a.baseline_mean_s},
                                 {"counts_digest", a.counts_digest},
                                 {"improvement_pct", a.improvement_pct},
                                 {"optimized_mean_s", a.optimized_mean_s}});
    }
    json timings = json::array();
    for (const auto& t : s.timings) timings.push_back(timing_json(t));
    return {{"baseline_mean_s", s.baseline_mean_s},
            {"improvement_pct_of_means", s.improvement_pct_of_means},
            {"mean_improvement_pct", s.mean_improvement_pct},
            {"means_test", means_test_json(s.means_test)},
            {"optimized_mean_s", s.optimized_mean_s},
            {"optimized_strategy", strategy_json(s.optimized)},
            {"per_attribute", std::move(per_attribute)},
            {"timings", std::move(timings)},
            {"trials", s.trials}};
}

TrialSuite trials_from(const json& j) {
    TrialSuite s;
    s.baseline_mean_s = j.at("baseline_mean_s").get<double>();
    s.improvement_pct_of_means = j.at("improvement_pct_of_means").get<double>();
    s.mean_improvement_pct = j.at("mean_improvement_pct").get<double>();
    auto m = means_test_from(j.at("means_test"));
    if (!m) inconsistent("trial suite is missing its means test");
    s.means_test = *m;
    s.optimized_mean_s = j.at("optimized_mean_s").get<double>();
    s.optimized = strategy_from(j.at("optimized_strategy"));
    for (const auto& a : j.at("per_attribute")) {
        TrialAttributeSummary summary;
        summary.attribute = a.at("attribute").get<std::string>();
        summary.baseline_mean_s = a.at("baseline_mean_s").get<double>();
        summary.counts_digest = a.at("counts_digest").get<std::string>();
        summary.improvement_pct = a.at("improvement_pct").get<double>();
        summary.optimized_mean_s = a.at("optimized_mean_s").get<double>();
        s.per_attribute.push_back(std::move(summary));
    }
    for (const auto& t : j.at("timings")) s.timings.push_back(timing_from(t));
    s.trials = j.at("trials").get<std::size_t>();
    return s;
}

json conventions_json() {
    return {{"counts_digest", "SHA-256 of the canonical JSON array of frequency tables"},
            {"improvement_pct", "100 * (baseline - optimized) / baseline"},
            {"mean_improvement_pct",
             "arithmetic mean of improvement_pct over (attribute, trial) pairs; declared convention"},
            {"improvement_pct_of_means", "improvement_pct of the mean baseline and mean optimized times"},
            {"means_test", "Welch two-sample t-test, two-sided, over all baseline vs all optimized timings; "
                           "declared convention"},
            {"protocol", "baseline (sequential) arm first, one untimed warm-up per arm, monotonic clock around "
                         "the counting call only"},
            {"synthetic_prng", kPrngName}};
}

// ---------------------------------------------------------------------------
// Recomputation

bool close(double a, double b) {
    if (a == b) return true;
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

void compare(std::vector<std::string>& problems, const std::string& where, double stored, double recomputed) {
    if (!close(stored, recomputed)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, ": stored %.17g, recomputed %.17g", stored, recomputed);
        problems.push_back(where + buf);
    }
}

void compare(std::vector<std::string>& problems, const std::string& where, const std::optional<MeansTestResult>& stored,
             const std::optional<MeansTestResult>& recomputed) {
    if (stored.has_value() != recomputed.has_value()) {
        problems.push_back(where + ": presence differs from recomputation");
        return;
    }
    if (!stored) return;
    compare(problems, where + ".t_statistic", stored->t_statistic, recomputed->t_statistic);
    compare(problems, where + ".degrees_of_freedom", stored->degrees_of_freedom, recomputed->degrees_of_freedom);
    compare(problems, where + ".p_value", stored->p_value, recomputed->p_value);
    compare(problems, where + ".alpha", stored->alpha, recomputed->alpha);
    if (stored->reject_null != recomputed->reject_null) {
        problems.push_back(where + ".reject_null differs from recomputation");
    }
}

template <class F>
void guarded(std::vector<std::string>& problems, const std::string& where, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        problems.push_back(where + ": " + e.what());
    }
}

std::vector<std::string> recompute_problems(const BenchmarkReport& r) {
    std::vector<std::string> problems;
    auto check_attrs = [&](const std::string& where, const std::vector<TrialTiming>& timings) {
        for (const auto& t : timings) {
            for (const auto& a : t.attributes) {
                if (std::find(r.dataset.attributes.begin(), r.dataset.attributes.end(), a) ==
                    r.dataset.attributes.end()) {
                    problems.push_back(where + ": attribute '" + a + "' is not in the dataset schema");
                    return;
                }
            }
        }
    };
    if (!r.cumulative && !r.trials) {
        problems.push_back("report contains no suite");
    }
    if (r.cumulative) {
        const auto& s = *r.cumulative;
        check_attrs("cumulative_suite", s.timings);
        guarded(problems, "cumulative_suite", [&] {
            const auto c = analyze_cumulative(s.timings, s.optimized, s.repeats, r.alpha);
            if (c.levels.size() != s.levels.size()) {
                problems.push_back("cumulative_suite.levels: count differs from recomputation");
            } else {
                for (std::size_t i = 0; i < c.levels.size(); ++i) {
                    const std::string w = "cumulative_suite.levels[" + std::to_string(i) + "]";
                    const auto& a = s.levels[i];
                    const auto& b = c.levels[i];
                    if (a.k != b.k || a.attributes != b.attributes || a.counts_digest != b.counts_digest) {
                        problems.push_back(w + ": identity fields differ from recomputation");
                    }
                    compare(problems, w + ".baseline_mean_s", a.baseline_mean_s, b.baseline_mean_s);
                    compare(problems, w + ".optimized_mean_s", a.optimized_mean_s, b.optimized_mean_s);
                    compare(problems, w + ".improvement_pct", a.improvement_pct, b.improvement_pct);
                }
            }
            compare(problems, "cumulative_suite.baseline_mean_s", s.baseline_mean_s, c.baseline_mean_s);
            compare(problems, "cumulative_suite.optimized_mean_s", s.optimized_mean_s, c.optimized_mean_s);
            compare(problems, "cumulative_suite.improvement_pct_of_means", s.improvement_pct_of_means,
                    c.improvement_pct_of_means);
            compare(problems, "cumulative_suite.means_test", s.means_test, c.means_test);
        });
    }
    if (r.trials) {
        const auto& s = *r.trials;
        check_attrs("trial_suite", s.timings);
        guarded(problems, "trial_suite", [&] {
            const auto c = analyze_trials(s.timings, s.optimized, s.trials, r.alpha);
            if (c.per_attribute.size() != s.per_attribute.size()) {
                problems.push_back("trial_suite.per_attribute: count differs from recomputation");
            } else {
                for (std::size_t i = 0; i < c.per_attribute.size(); ++i) {
                    const std::string w = "trial_suite.per_attribute[" + std::to_string(i) + "]";
                    const auto& a = s.per_attribute[i];
                    const auto& b = c.per_attribute[i];
                    if (a.attribute != b.attribute || a.counts_digest != b.counts_digest) {
                        problems.push_back(w + ": identity fields differ from recomputation");
                    }
                    compare(problems, w + ".baseline_mean_s", a.baseline_mean_s, b.baseline_mean_s);
                    compare(problems, w + ".optimized_mean_s", a.optimized_mean_s, b.optimized_mean_s);
                    compare(problems, w + ".improvement_pct", a.improvement_pct, b.improvement_pct);
                }
            }
            compare(problems, "trial_suite.baseline_mean_s", s.baseline_mean_s, c.baseline_mean_s);
            compare(problems, "trial_suite.optimized_mean_s", s.optimized_mean_s, c.optimized_mean_s);
            compare(problems, "trial_suite.mean_improvement_pct", s.mean_improvement_pct, c.mean_improvement_pct);
            compare(problems, "trial_suite.improvement_pct_of_means", s.improvement_pct_of_means,
                    c.improvement_pct_of_means);
            compare(problems, "trial_suite.means_test", s.means_test, c.means_test);
        });
    }
    return problems;
}

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Error(ErrorKind::IoError, "failed writing " + path.string());
    }
}

} // namespace

// ---------------------------------------------------------------------------

DatasetSummary dataset_summary(const Dataset& ds) {
    return {ds.row_count(), ds.schema().names()};
}

Environment current_environment() {
    Environment env;
    env.hardware_threads = hardware_parallelism();
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    env.timestamp = buf;
    return env;
}

std::optional<MeansTestResult> BenchmarkReport::means_test() const {
    if (trials) return trials->means_test;
    if (cumulative) return cumulative->means_test;
    return std::nullopt;
}

BenchmarkReport assemble_report(DatasetSummary dataset, double alpha, std::optional<CumulativeSuite> cumulative,
                                std::optional<TrialSuite> trials, Environment environment) {
    if (!cumulative && !trials) inconsistent("a report needs at least one suite");
    if (cumulative && cumulative->timings.empty()) inconsistent("cumulative suite has no timings");
    if (trials && trials->timings.empty()) inconsistent("trial suite has no timings");

    BenchmarkReport report;
    report.dataset = std::move(dataset);
    report.alpha = alpha;
    report.cumulative = std::move(cumulative);
    report.trials = std::move(trials);
    report.environment = std::move(environment);

    if (auto problems = recompute_problems(report); !problems.empty()) {
        std::string msg = "report inputs are inconsistent:";
        for (const auto& p : problems) msg += "\n  " + p;
        inconsistent(msg);
    }
    return report;
}

std::string report_to_json(const BenchmarkReport& report) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["alpha"] = report.alpha;
    j["dataset"] = {{"attributes", report.dataset.attributes}, {"row_count", report.dataset.row_count}};
    j["cumulative_suite"] = report.cumulative ? cumulative_json(*report.cumulative) : json(nullptr);
    j["trial_suite"] = report.trials ? trials_json(*report.trials) : json(nullptr);
    j["means_test"] = means_test_json(report.means_test());
    j["means_test_source"] = report.trials ? "trial_suite" : "cumulative_suite";
    j["conventions"] = conventions_json();
    j["environment"] = {{"hardware_threads", report.environment.hardware_threads},
                        {"timestamp", report.environment.timestamp}};
    return j.dump(2) + "\n";
}

BenchmarkReport report_from_json(std::string_view text) {
    BenchmarkReport r;
    try {
        const auto j = json::parse(text);
        if (j.at("schema_version").get<std::string>() != kReportSchemaVersion) {
            inconsistent("unsupported report schema '" + j.at("schema_version").get<std::string>() + "'");
        }
        r.alpha = j.at("alpha").get<double>();
        r.dataset.attributes = j.at("dataset").at("attributes").get<std::vector<std::string>>();
        r.dataset.row_count = j.at("dataset").at("row_count").get<std::size_t>();
        if (!j.at("cumulative_suite").is_null()) r.cumulative = cumulative_from(j.at("cumulative_suite"));
        if (!j.at("trial_suite").is_null()) r.trials = trials_from(j.at("trial_suite"));
        r.environment.hardware_threads = j.at("environment").at("hardware_threads").get<std::size_t>();
        r.environment.timestamp = j.at("environment").at("timestamp").get<std::string>();
    } catch (const json::exception& e) {
        inconsistent(std::string("malformed report JSON: ") + e.what());
    }
    return r;
}

std::vector<std::string> verify_report(std::string_view text) {
    BenchmarkReport r;
    std::vector<std::string> problems;
    try {
        r = report_from_json(text);
        problems = recompute_problems(r);
        const auto j = json::parse(text);
        compare(problems, "means_test", means_test_from(j.at("means_test")), r.means_test());
    } catch (const Error& e) {
        problems.push_back(e.what());
    } catch (const json::exception& e) {
        problems.push_back(std::string("malformed report JSON: ") + e.what());
    }
    return problems;
}

std::string cumulative_csv(const BenchmarkReport& report) {
    std::string out = "k,baseline_s,optimized_s,improvement_pct\n";
    if (report.cumulative) {
        for (const auto& l : report.cumulative->levels) {
            out += std::to_string(l.k) + "," + shortest(l.baseline_mean_s) + "," + shortest(l.optimized_mean_s) +
                   "," + shortest(l.improvement_pct) + "\n";
        }
    }
    return out;
}

std::string trials_csv(const BenchmarkReport& report) {
    std::string out = "attribute,trial,arm,seconds\n";
    if (report.trials) {
        for (const auto& t : report.trials->timings) {
            out += csv_field(t.attributes.front()) + "," + std::to_string(t.trial_index) + "," +
                   std::string(to_string(t.arm)) + "," + shortest(t.wall_seconds) + "\n";
        }
    }
    return out;
}

void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "report.json", report_to_json(report));
    write_text(dir / "cumulative.csv", cumulative_csv(report));
    write_text(dir / "trials.csv", trials_csv(report));
}

} // namespace freqbench
