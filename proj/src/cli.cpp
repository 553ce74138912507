#include "freqbench/cli.hpp"

#include "freqbench/digest.hpp"
#include "freqbench/error.hpp"
#include "freqbench/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace freqbench::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DigestMismatch:
        return kCorrectnessFailure;
    case ErrorKind::UnknownAttribute:
    case ErrorKind::DuplicateAttribute:
    case ErrorKind::InvalidStrategy:
    case ErrorKind::InvalidSpec:
    case ErrorKind::StrategyIsSequential:
    case ErrorKind::InsufficientTrials:
        return kUsageError;
    default:
        return kDataError;
    }
}

std::string seconds_text(double s) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f s", s);
    return buf;
}

std::string pct_text(double p) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f%%", p);
    return buf;
}

std::string alpha_text(double a) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

char delimiter_of(const RunConfig& c) {
    if (c.delimiter == "\\t" || c.delimiter == "tab") return '\t';
    if (c.delimiter.size() != 1) {
        throw UsageError("--delimiter must be a single character");
    }
    return c.delimiter.front();
}

std::string improvement_line(std::string_view label, double pct, const std::optional<MeansTestResult>& test,
                             double alpha) {
    std::string line = std::string(label) + " improvement: " + pct_text(pct);
    if (test) {
        line += " (means test: reject at alpha=" + alpha_text(alpha) +
                ": " + (test->reject_null ? "true" : "false") + ")";
    } else {
        line += " (means test: not enough timings)";
    }
    return line;
}

} // namespace

std::vector<std::string> resolve_attributes(const std::string& list, const AttributeSchema& schema) {
    std::vector<std::string> out;
    if (list == "all") {
        return schema.names();
    }
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        auto item = std::string_view(list).substr(start, comma - start);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        if (!item.empty() && std::find(out.begin(), out.end(), item) == out.end()) {
            out.emplace_back(item);
        }
        start = comma + 1;
    }
    if (out.empty()) {
        throw UsageError("--attributes names no attributes");
    }
    for (const auto& name : out) {
        schema.index_of(name);
    }
    return out;
}

ExecutionStrategy make_strategy(const RunConfig& c, std::size_t attribute_count, std::string_view fallback) {
    const std::string name = c.strategy.empty() ? std::string(fallback) : c.strategy;
    auto positive = [](const std::optional<std::size_t>& v, const char* flag) {
        if (v && *v == 0) throw UsageError(std::string(flag) + " must be at least 1");
    };
    positive(c.workers, "--workers");
    positive(c.chunk, "--chunk");
    positive(c.chunk_workers, "--chunk-workers");

    const std::size_t hw = hardware_parallelism();
    if (name == "sequential") return Sequential{};
    if (name == "per-attribute") {
        return c.workers ? PerAttribute{*c.workers} : default_per_attribute(attribute_count);
    }
    if (name == "row-chunks") {
        return RowChunks{c.workers.value_or(hw), c.chunk};
    }
    if (name == "hybrid") {
        const std::size_t attr_workers = c.workers.value_or(default_per_attribute(attribute_count).max_workers);
        return Hybrid{attr_workers, c.chunk_workers.value_or(std::max<std::size_t>(1, hw / attr_workers)), c.chunk};
    }
    throw UsageError("--strategy must be one of sequential, per-attribute, row-chunks, hybrid (got '" + name + "')");
}

// ---------------------------------------------------------------------------

int cmd_gen(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.out.empty()) throw UsageError("gen requires --out");
    const char delim = delimiter_of(c);
    SyntheticSpec spec;
    if (!c.spec.empty()) {
        spec = load_spec(c.spec);
        if (c.rows) spec.rows = *c.rows;
        if (c.seed) spec.seed = *c.seed;
    } else {
        if (!c.rows) throw UsageError("gen requires --rows or --spec");
        if (*c.rows == 0) throw UsageError("--rows must be at least 1");
        spec = default_vitals_spec(*c.rows, c.seed.value_or(42));
    }
    if (spec.rows == 0) throw UsageError("--rows must be at least 1");

    const Dataset ds = generate(spec);
    write_delimited(ds, std::filesystem::path(c.out), delim);
    out << "wrote " << ds.row_count() << " rows x " << ds.attribute_count() << " attributes to " << c.out
        << " (seed " << spec.seed << ", " << kPrngName << ")\n";
    for (const auto& attr : spec.attributes) {
        out << "  " << attr.name << ": " << attr.categories.size() << " categories\n";
    }
    (void)err;
    return kSuccess;
}

int cmd_count(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.input.empty()) throw UsageError("count requires --input");
    const char delim = delimiter_of(c);
    const Dataset ds = load_delimited(c.input, {delim, !c.no_header});
    const auto names = resolve_attributes(c.attributes, ds.schema());
    const ExecutionStrategy strategy = make_strategy(c, names.size(), "sequential");
    validate(strategy);

    out << "dataset: " << c.input << " (" << ds.row_count() << " rows, " << ds.attribute_count()
        << " attributes)\n";
    out << "strategy: " << describe(strategy) << "\n";

    std::vector<FrequencyTable> tables;
    std::vector<std::optional<double>> per_attribute_seconds(names.size());
    double total_seconds = 0.0;
    const bool one_at_a_time = std::holds_alternative<Sequential>(strategy) || std::holds_alternative<RowChunks>(strategy);
    if (one_at_a_time) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto [t, s] = measure([&] { return count_many(ds, std::span(&names[i], 1), strategy); });
            tables.push_back(std::move(t.front()));
            per_attribute_seconds[i] = s;
            total_seconds += s;
        }
    } else {
        auto [t, s] = measure([&] { return count_many(ds, names, strategy); });
        tables = std::move(t);
        total_seconds = s;
    }

    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& t = tables[i];
        out << t.attribute() << ": " << t.total() << " rows, " << t.distinct() << " distinct values";
        if (per_attribute_seconds[i]) out << ", counted in " << seconds_text(*per_attribute_seconds[i]);
        out << "\n";
        for (const auto& [value, n] : t.counts()) {
            out << "  " << value << ":" << n << "\n";
        }
    }
    out << "counting time: " << seconds_text(total_seconds) << " for " << tables.size() << " attribute(s)\n";

    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
        f << to_json(tables) << "\n";
        if (!f) {
            err << "error: failed writing " << c.out << "\n";
            return kDataError;
        }
    }
    return kSuccess;
}

int cmd_bench(const RunConfig& c, std::ostream& out, std::ostream& err, const Hooks& hooks) {
    if (c.synthetic == !c.input.empty()) throw UsageError("bench requires exactly one of --input or --synthetic");
    if (c.suite != "cumulative" && c.suite != "trials" && c.suite != "both") {
        throw UsageError("--suite must be one of cumulative, trials, both (got '" + c.suite + "')");
    }
    if (c.repeats == 0) throw UsageError("--repeats must be at least 1");
    if (c.trials < 2) throw UsageError("--trials must be at least 2");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw UsageError("--alpha must lie strictly between 0 and 1");
    const char delim = delimiter_of(c);

    Dataset ds;
    std::string source;
    if (c.synthetic) {
        SyntheticSpec spec;
        if (!c.spec.empty()) {
            spec = load_spec(c.spec);
            if (c.rows) spec.rows = *c.rows;
            if (c.seed) spec.seed = *c.seed;
        } else {
            const std::uint64_t rows = c.rows.value_or(500000);
            if (rows == 0) throw UsageError("--rows must be at least 1");
            spec = default_vitals_spec(rows, c.seed.value_or(42));
        }
        if (spec.rows == 0) throw UsageError("--rows must be at least 1");
        ds = generate(spec);
        source = "synthetic (rows=" + std::to_string(spec.rows) + ", seed=" + std::to_string(spec.seed) + ")";
    } else {
        ds = load_delimited(c.input, {delim, !c.no_header});
        source = c.input;
    }
    const auto names = resolve_attributes(c.attributes, ds.schema());
    const ExecutionStrategy strategy = make_strategy(c, names.size(), "per-attribute");

    out << "dataset: " << source << ", " << ds.row_count() << " rows, " << names.size() << " attribute(s)\n";
    out << "optimized strategy: " << describe(strategy) << "\n";

    SuiteOptions options;
    options.optimized = strategy;
    options.alpha = c.alpha;
    if (hooks.count) options.count = hooks.count;

    std::optional<CumulativeSuite> cumulative;
    std::optional<TrialSuite> trials;
    if (c.suite == "cumulative" || c.suite == "both") {
        options.runs = c.repeats;
        cumulative = run_cumulative_suite(ds, names, options);
        out << "cumulative suite (repeats=" << c.repeats << "):\n";
        for (const auto& l : cumulative->levels) {
            out << "  k=" << l.k << " baseline " << seconds_text(l.baseline_mean_s) << " optimized "
                << seconds_text(l.optimized_mean_s) << " improvement " << pct_text(l.improvement_pct) << "\n";
        }
        out << improvement_line("cumulative suite", cumulative->improvement_pct_of_means, cumulative->means_test,
                                c.alpha)
            << "\n";
    }
    if (c.suite == "trials" || c.suite == "both") {
        options.runs = c.trials;
        trials = run_trial_suite(ds, names, options);
        out << "trial suite (trials=" << c.trials << "):\n";
        for (const auto& a : trials->per_attribute) {
            out << "  " << a.attribute << " baseline " << seconds_text(a.baseline_mean_s) << " optimized "
                << seconds_text(a.optimized_mean_s) << " improvement " << pct_text(a.improvement_pct) << "\n";
        }
        out << improvement_line("trial suite", trials->mean_improvement_pct, trials->means_test, c.alpha) << "\n";
        out << "trial suite improvement of means: " << pct_text(trials->improvement_pct_of_means) << "\n";
    }

    const auto report = assemble_report(dataset_summary(ds), c.alpha, std::move(cumulative), std::move(trials),
                                        current_environment());
    const std::filesystem::path dir = c.out.empty() ? std::filesystem::path("freqbench-results") : std::filesystem::path(c.out);
    write_report_files(report, dir);
    out << "wrote report.json, cumulative.csv, trials.csv to " << dir.string() << "\n";
    (void)err;
    return kSuccess;
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
    RunConfig c;
    std::size_t workers = 0;
    std::size_t chunk = 0;
    std::size_t chunk_workers = 0;
    std::uint64_t seed = 0;
    std::uint64_t rows = 0;

    CLI::App app{"Categorical frequency counting and thread speedup benchmarks", "freqbench"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic vital-events dataset");
    gen->add_option("--rows", rows, "Number of data rows (default spec)");
    gen->add_option("--seed", seed, "Random seed (default 42)");
    gen->add_option("--spec", c.spec, "Synthetic spec JSON file");
    gen->add_option("--out", c.out, "Output delimited file");
    gen->add_option("--delimiter", c.delimiter, "Field delimiter (default ',')");

    auto* count = app.add_subcommand("count", "Count value frequencies per attribute");
    count->add_option("--input", c.input, "Delimited input file");
    count->add_option("--attributes", c.attributes, "Comma-separated attributes or 'all' (default all)");
    count->add_option("--strategy", c.strategy, "sequential|per-attribute|row-chunks|hybrid (default sequential)");
    count->add_option("--workers", workers, "Worker threads (attribute workers for hybrid)");
    count->add_option("--chunk", chunk, "Rows per chunk for row-chunks and hybrid");
    count->add_option("--chunk-workers", chunk_workers, "Chunk workers per attribute for hybrid");
    count->add_option("--out", c.out, "Write frequency tables as JSON");
    count->add_option("--delimiter", c.delimiter, "Field delimiter (default ',')");
    count->add_flag("--no-header", c.no_header, "Input has no header row");

    auto* bench = app.add_subcommand("bench", "Time sequential against threaded counting");
    bench->add_option("--input", c.input, "Delimited input file");
    bench->add_flag("--synthetic", c.synthetic, "Benchmark a generated dataset instead of --input");
    bench->add_option("--rows", rows, "Rows for --synthetic (default 500000)");
    bench->add_option("--seed", seed, "Seed for --synthetic (default 42)");
    bench->add_option("--spec", c.spec, "Synthetic spec JSON file for --synthetic");
    bench->add_option("--attributes", c.attributes, "Comma-separated attributes or 'all' (default all)");
    bench->add_option("--strategy", c.strategy, "Optimized arm: per-attribute|row-chunks|hybrid (default per-attribute)");
    bench->add_option("--workers", workers, "Worker threads (attribute workers for hybrid)");
    bench->add_option("--chunk", chunk, "Rows per chunk for row-chunks and hybrid");
    bench->add_option("--chunk-workers", chunk_workers, "Chunk workers per attribute for hybrid");
    bench->add_option("--suite", c.suite, "cumulative|trials|both (default both)");
    bench->add_option("--repeats", c.repeats, "Timed runs per arm per cumulative level (default 5)");
    bench->add_option("--trials", c.trials, "Timed runs per arm per attribute in the trial suite (default 5)");
    bench->add_option("--alpha", c.alpha, "Significance level of the means test (default 0.05)");
    bench->add_option("--out", c.out, "Output directory for report.json and plot CSVs (default freqbench-results)");
    bench->add_option("--delimiter", c.delimiter, "Field delimiter (default ',')");
    bench->add_flag("--no-header", c.no_header, "Input has no header row");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    auto* active = app.get_subcommands().front();
    c.subcommand = active->get_name();
    if (active->get_option_no_throw("--workers") && active->count("--workers")) c.workers = workers;
    if (active->get_option_no_throw("--chunk") && active->count("--chunk")) c.chunk = chunk;
    if (active->get_option_no_throw("--chunk-workers") && active->count("--chunk-workers")) c.chunk_workers = chunk_workers;
    if (active->get_option_no_throw("--seed") && active->count("--seed")) c.seed = seed;
    if (active->get_option_no_throw("--rows") && active->count("--rows")) c.rows = rows;

    try {
        if (c.subcommand == "gen") return cmd_gen(c, out, err);
        if (c.subcommand == "count") return cmd_count(c, out, err);
        return cmd_bench(c, out, err, hooks);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

} // namespace freqbench::cli
