#include "freqbench/counter.hpp"

#include "freqbench/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace freqbench {

// ---------------------------------------------------------------------------
// FrequencyTable

void FrequencyTable::add(std::string_view value, std::uint64_t n) {
    if (n == 0) return;
    auto it = counts_.find(value);
    if (it == counts_.end()) {
        counts_.emplace(std::string(value), n);
    } else {
        it->second += n;
    }
}

std::uint64_t FrequencyTable::count(std::string_view value) const noexcept {
    auto it = counts_.find(value);
    return it == counts_.end() ? 0 : it->second;
}

std::uint64_t FrequencyTable::total() const noexcept {
    std::uint64_t sum = 0;
    for (const auto& [_, n] : counts_) sum += n;
    return sum;
}

namespace {

nlohmann::json table_json(const FrequencyTable& table) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [value, n] : table.counts()) {
        counts[value] = n;
    }
    return {{"attribute", table.attribute()}, {"counts", std::move(counts)}};
}

} // namespace

std::string to_json(const FrequencyTable& table) {
    return table_json(table).dump();
}

std::string to_json(std::span<const FrequencyTable> tables) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : tables) {
        arr.push_back(table_json(t));
    }
    return arr.dump();
}

// ---------------------------------------------------------------------------
// Strategies

void validate(const ExecutionStrategy& strategy) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::InvalidStrategy, what);
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PerAttribute>) {
                require(s.max_workers >= 1, "per-attribute strategy needs at least one worker");
            } else if constexpr (std::is_same_v<T, RowChunks>) {
                require(s.workers >= 1, "row-chunks strategy needs at least one worker");
                require(!s.chunk || *s.chunk >= 1, "row-chunks chunk size must be positive");
            } else if constexpr (std::is_same_v<T, Hybrid>) {
                require(s.attribute_workers >= 1, "hybrid strategy needs at least one attribute worker");
                require(s.chunk_workers >= 1, "hybrid strategy needs at least one chunk worker");
                require(!s.chunk || *s.chunk >= 1, "hybrid chunk size must be positive");
            }
        },
        strategy);
}

std::string_view strategy_name(const ExecutionStrategy& strategy) noexcept {
    switch (strategy.index()) {
    case 0: return "sequential";
    case 1: return "per-attribute";
    case 2: return "row-chunks";
    default: return "hybrid";
    }
}

std::string describe(const ExecutionStrategy& strategy) {
    auto chunk_text = [](const std::optional<std::size_t>& c) {
        return c ? std::to_string(*c) : std::string("auto");
    };
    return std::visit(
        [&](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sequential>) {
                return "sequential";
            } else if constexpr (std::is_same_v<T, PerAttribute>) {
                return "per-attribute(max_workers=" + std::to_string(s.max_workers) + ")";
            } else if constexpr (std::is_same_v<T, RowChunks>) {
                return "row-chunks(workers=" + std::to_string(s.workers) + ", chunk=" + chunk_text(s.chunk) + ")";
            } else {
                return "hybrid(attribute_workers=" + std::to_string(s.attribute_workers) +
                       ", chunk_workers=" + std::to_string(s.chunk_workers) + ", chunk=" + chunk_text(s.chunk) + ")";
            }
        },
        strategy);
}

std::size_t default_chunk_rows(std::size_t rows, std::size_t workers) noexcept {
    const std::size_t w = std::max<std::size_t>(workers, 1);
    return std::max<std::size_t>(1024, rows / (4 * w));
}

std::size_t hardware_parallelism() {
    if (const char* env = std::getenv("FREQBENCH_THREADS"); env != nullptr && *env != '\0') {
        std::size_t n = 0;
        const char* end = env + std::char_traits<char>::length(env);
        auto [ptr, ec] = std::from_chars(env, end, n);
        if (ec == std::errc{} && ptr == end && n >= 1) {
            return n;
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

PerAttribute default_per_attribute(std::size_t attribute_count) {
    return PerAttribute{std::max<std::size_t>(1, std::min(attribute_count, hardware_parallelism()))};
}

// ---------------------------------------------------------------------------
// Counting engine

namespace {

// Keys view into the Dataset's column storage.
using PartialCounts = std::unordered_map<std::string_view, std::uint64_t>;

void count_range(const Column& column, std::size_t begin, std::size_t end, PartialCounts& out) {
    for (std::size_t r = begin; r < end; ++r) {
        ++out[column[r]];
    }
}

FrequencyTable to_table(std::string attribute, const PartialCounts& partial) {
    FrequencyTable t(std::move(attribute));
    for (const auto& [value, n] : partial) {
        t.add(value, n);
    }
    return t;
}

/// Runs body(worker) on `workers` workers: the caller plus workers-1 threads.
/// The first exception thrown by any worker is rethrown after all have joined.
template <class Body>
void run_workers(std::size_t workers, Body&& body) {
    if (workers <= 1) {
        body(std::size_t{0});
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto guarded = [&](std::size_t w) {
        try {
            body(w);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            threads.emplace_back(guarded, w);
        }
        guarded(0);
    }
    if (failure) std::rethrow_exception(failure);
}

FrequencyTable count_chunked(const Column& column, const std::string& attribute, std::size_t workers,
                             std::optional<std::size_t> chunk) {
    const std::size_t rows = column.size();
    const std::size_t chunk_rows = chunk.value_or(default_chunk_rows(rows, workers));
    const std::size_t chunks = rows == 0 ? 0 : (rows + chunk_rows - 1) / chunk_rows;
    const std::size_t active = std::max<std::size_t>(1, std::min(workers, chunks));

    std::vector<PartialCounts> partials(active);
    std::atomic<std::size_t> next{0};
    run_workers(active, [&](std::size_t w) {
        for (std::size_t c = next.fetch_add(1, std::memory_order_relaxed); c < chunks;
             c = next.fetch_add(1, std::memory_order_relaxed)) {
            const std::size_t begin = c * chunk_rows;
            count_range(column, begin, std::min(rows, begin + chunk_rows), partials[w]);
        }
    });

    PartialCounts& total = partials.front();
    for (std::size_t w = 1; w < partials.size(); ++w) {
        for (const auto& [value, n] : partials[w]) {
            total[value] += n;
        }
    }
    return to_table(attribute, total);
}

FrequencyTable count_whole(const Column& column, const std::string& attribute) {
    PartialCounts partial;
    count_range(column, 0, column.size(), partial);
    return to_table(attribute, partial);
}

} // namespace

FrequencyTable count_attribute(const Dataset& ds, std::string_view name) {
    const Column& column = ds.column(name);
    return count_whole(column, std::string(name));
}

std::vector<FrequencyTable> count_many(const Dataset& ds, std::span<const std::string> names,
                                       const ExecutionStrategy& strategy) {
    validate(strategy);
    if (names.empty()) {
        throw Error(ErrorKind::EmptyInput, "no attributes requested");
    }
    std::vector<const Column*> columns;
    columns.reserve(names.size());
    std::unordered_set<std::string_view> seen;
    for (const auto& name : names) {
        columns.push_back(&ds.column(name));
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::DuplicateAttribute, "attribute '" + name + "' requested more than once");
        }
    }

    std::vector<FrequencyTable> results(names.size());

    auto over_attributes = [&](std::size_t workers, auto&& count_one) {
        std::atomic<std::size_t> next{0};
        const std::size_t active = std::min(workers, names.size());
        run_workers(active, [&](std::size_t) {
            for (std::size_t i = next.fetch_add(1, std::memory_order_relaxed); i < names.size();
                 i = next.fetch_add(1, std::memory_order_relaxed)) {
                results[i] = count_one(i);
            }
        });
    };

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sequential>) {
                for (std::size_t i = 0; i < names.size(); ++i) {
                    results[i] = count_whole(*columns[i], names[i]);
                }
            } else if constexpr (std::is_same_v<T, PerAttribute>) {
                over_attributes(s.max_workers, [&](std::size_t i) { return count_whole(*columns[i], names[i]); });
            } else if constexpr (std::is_same_v<T, RowChunks>) {
                for (std::size_t i = 0; i < names.size(); ++i) {
                    results[i] = count_chunked(*columns[i], names[i], s.workers, s.chunk);
                }
            } else {
                over_attributes(s.attribute_workers, [&](std::size_t i) {
                    return count_chunked(*columns[i], names[i], s.chunk_workers, s.chunk);
                });
            }
        },
        strategy);
    return results;
}

FrequencyTable merge(std::span<const FrequencyTable> partials) {
    if (partials.empty()) {
        throw Error(ErrorKind::EmptyInput, "merge needs at least one partial table");
    }
    FrequencyTable out(partials.front().attribute());
    for (const auto& p : partials) {
        if (p.attribute() != out.attribute()) {
            throw Error(ErrorKind::MixedAttributes, "cannot merge tables for '" + out.attribute() + "' and '" +
                                                        p.attribute() + "'");
        }
        for (const auto& [value, n] : p.counts()) {
            out.add(value, n);
        }
    }
    return out;
}

} // namespace freqbench
