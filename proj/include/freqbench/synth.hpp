#pragma once

#include "freqbench/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace freqbench {

struct Category {
    std::string value;
    double p = 0.0;
    friend bool operator==(const Category&, const Category&) = default;
};

struct CategoricalAttribute {
    std::string name;
    std::vector<Category> categories;
    friend bool operator==(const CategoricalAttribute&, const CategoricalAttribute&) = default;
};

/// Recipe for a synthetic dataset: independent categorical draws per attribute.
struct SyntheticSpec {
    std::uint64_t rows = 0;
    std::uint64_t seed = 0;
    std::vector<CategoricalAttribute> attributes;

    /// Throws InvalidSpec unless rows >= 1, at least one attribute, unique
    /// non-empty names, non-empty categories with p in [0, 1] summing to 1 +/- 1e-9.
    void validate() const;

    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

/// Name of the per-cell random stream; recorded in spec files and reports.
inline constexpr std::string_view kPrngName = "splitmix64-counter/1";

/// Uniform double in [0, 1) for one cell. This is output number
/// row * attribute_count + attribute + 1 of a SplitMix64 stream seeded with
/// `seed`, so every cell is computable without generating the others.
double cell_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t attribute_count,
                    std::uint64_t attribute) noexcept;

/// Nine-attribute vital-events schema: year, month, sex, vital_event,
/// registration_type, department, province, district, registration_office.
/// sex and vital_event follow the observed registry proportions; the rest
/// are uniform over synthetic vocabularies. Throws InvalidSpec for rows == 0.
SyntheticSpec default_vitals_spec(std::uint64_t rows, std::uint64_t seed);

/// Deterministic in (spec, seed). Throws InvalidSpec.
Dataset generate(const SyntheticSpec& spec);

std::string spec_to_json(const SyntheticSpec& spec);
/// Throws InvalidSpec on schema or value errors.
SyntheticSpec spec_from_json(std::string_view text);
SyntheticSpec load_spec(const std::filesystem::path& path);

} // namespace freqbench
