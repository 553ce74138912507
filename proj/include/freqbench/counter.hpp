#pragma once

#include "freqbench/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace freqbench {

/// Occurrence count of every distinct value of one attribute.
/// Keys iterate in lexicographic (bytewise) order; zero counts are never stored.
class FrequencyTable {
public:
    using Counts = std::map<std::string, std::uint64_t, std::less<>>;

    FrequencyTable() = default;
    explicit FrequencyTable(std::string attribute) : attribute_(std::move(attribute)) {}

    const std::string& attribute() const noexcept { return attribute_; }
    const Counts& counts() const noexcept { return counts_; }

    void add(std::string_view value, std::uint64_t n = 1);

    std::uint64_t count(std::string_view value) const noexcept;
    std::uint64_t total() const noexcept;
    std::size_t distinct() const noexcept { return counts_.size(); }

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

private:
    std::string attribute_;
    Counts counts_;
};

/// Canonical compact JSON: {"attribute":name,"counts":{value:count,...}}.
std::string to_json(const FrequencyTable& table);
/// Canonical compact JSON array of tables, in the given order.
std::string to_json(std::span<const FrequencyTable> tables);

// ---------------------------------------------------------------------------
// Execution strategies. Results never depend on the strategy, only timing does.

struct Sequential {
    friend bool operator==(const Sequential&, const Sequential&) = default;
};

/// One worker per attribute, at most `max_workers` at a time.
struct PerAttribute {
    std::size_t max_workers = 1;
    friend bool operator==(const PerAttribute&, const PerAttribute&) = default;
};

/// Each attribute is split into row chunks counted by `workers` threads.
/// An empty `chunk` selects default_chunk_rows().
struct RowChunks {
    std::size_t workers = 1;
    std::optional<std::size_t> chunk;
    friend bool operator==(const RowChunks&, const RowChunks&) = default;
};

/// `attribute_workers` attributes in flight, each row-chunked over `chunk_workers`.
struct Hybrid {
    std::size_t attribute_workers = 1;
    std::size_t chunk_workers = 1;
    std::optional<std::size_t> chunk;
    friend bool operator==(const Hybrid&, const Hybrid&) = default;
};

using ExecutionStrategy = std::variant<Sequential, PerAttribute, RowChunks, Hybrid>;

/// Throws InvalidStrategy for a zero worker count or zero chunk size.
void validate(const ExecutionStrategy& strategy);

/// Short name used by the CLI and reports: sequential, per-attribute, row-chunks, hybrid.
std::string_view strategy_name(const ExecutionStrategy& strategy) noexcept;
/// Name plus parameters, e.g. "row-chunks(workers=4, chunk=auto)".
std::string describe(const ExecutionStrategy& strategy);

/// max(1024, rows / (4 * workers))
std::size_t default_chunk_rows(std::size_t rows, std::size_t workers) noexcept;

/// Hardware threads available, overridable with FREQBENCH_THREADS.
std::size_t hardware_parallelism();

/// PerAttribute{min(attribute_count, hardware_parallelism())}.
PerAttribute default_per_attribute(std::size_t attribute_count);

// ---------------------------------------------------------------------------

/// Full scan of one column on the calling thread. Throws UnknownAttribute.
FrequencyTable count_attribute(const Dataset& ds, std::string_view name);

/// Counts each requested attribute; result order matches `names`.
/// Throws EmptyInput, UnknownAttribute, DuplicateAttribute or InvalidStrategy.
std::vector<FrequencyTable> count_many(const Dataset& ds, std::span<const std::string> names,
                                       const ExecutionStrategy& strategy);

/// Key-wise sum of partial tables for one attribute. Throws MixedAttributes
/// when the partials disagree on the attribute name, EmptyInput for no partials.
FrequencyTable merge(std::span<const FrequencyTable> partials);

} // namespace freqbench
