#include "freqbench/synth.hpp"

#include "freqbench/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>

namespace freqbench {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Category> uniform(std::vector<std::string> values) {
    std::vector<Category> out;
    const double p = 1.0 / static_cast<double>(values.size());
    for (auto& v : values) out.push_back({std::move(v), p});
    return out;
}

std::vector<std::string> labelled(std::string_view prefix, int first, int last, int width) {
    std::vector<std::string> out;
    for (int i = first; i <= last; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%0*d", width, i);
        out.push_back(std::string(prefix) + buf);
    }
    return out;
}

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorKind::InvalidSpec, what);
}

} // namespace

double cell_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t attribute_count,
                    std::uint64_t attribute) noexcept {
    const std::uint64_t index = row * attribute_count + attribute + 1;
    const std::uint64_t z = splitmix64_mix(seed + index * kGoldenGamma);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

void SyntheticSpec::validate() const {
    if (rows == 0) invalid("rows must be at least 1");
    if (attributes.empty()) invalid("spec needs at least one attribute");
    std::set<std::string_view> names;
    for (const auto& attr : attributes) {
        if (attr.name.empty()) invalid("attribute with an empty name");
        if (!names.insert(attr.name).second) invalid("duplicate attribute '" + attr.name + "'");
        if (attr.categories.empty()) invalid("attribute '" + attr.name + "' has no categories");
        double sum = 0.0;
        std::set<std::string_view> values;
        for (const auto& c : attr.categories) {
            if (!(c.p >= 0.0 && c.p <= 1.0)) {
                invalid("attribute '" + attr.name + "': probability of '" + c.value + "' outside [0, 1]");
            }
            if (!values.insert(c.value).second) {
                invalid("attribute '" + attr.name + "': duplicate category '" + c.value + "'");
            }
            if (normalize_field(c.value) != c.value) {
                invalid("attribute '" + attr.name + "': category '" + c.value +
                        "' is empty or has surrounding whitespace");
            }
            sum += c.p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            invalid("attribute '" + attr.name + "': probabilities sum to " + std::to_string(sum) + ", not 1");
        }
    }
}

SyntheticSpec default_vitals_spec(std::uint64_t rows, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.rows = rows;
    spec.seed = seed;
    spec.attributes = {
        {"year", uniform(labelled("", 2012, 2022, 4))},
        {"month", uniform(labelled("", 1, 12, 2))},
        {"sex", {{"male", 0.4416}, {"female", 0.4336}, {"not_applicable", 0.1248}}},
        {"vital_event", {{"birth", 0.6154}, {"death", 0.2598}, {"marriage", 0.1248}}},
        {"registration_type", uniform(labelled("type_", 1, 3, 1))},
        {"department", uniform(labelled("dept_", 1, 25, 2))},
        {"province", uniform(labelled("prov_", 1, 10, 2))},
        {"district", uniform(labelled("dist_", 1, 10, 2))},
        {"registration_office", uniform(labelled("office_", 1, 5, 1))},
    };
    spec.validate();
    return spec;
}

Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const std::uint64_t width = spec.attributes.size();
    std::vector<std::string> names;
    std::vector<Column> columns;
    for (std::uint64_t a = 0; a < width; ++a) {
        const auto& attr = spec.attributes[a];
        names.push_back(attr.name);

        // Inverse CDF over the declared category order.
        std::vector<double> cumulative;
        double acc = 0.0;
        for (const auto& c : attr.categories) {
            acc += c.p;
            cumulative.push_back(acc);
        }
        std::size_t longest = 0;
        for (const auto& c : attr.categories) longest = std::max(longest, c.value.size());

        Column::Builder builder;
        builder.reserve(spec.rows, spec.rows * longest);
        for (std::uint64_t r = 0; r < spec.rows; ++r) {
            const double u = cell_uniform(spec.seed, r, width, a);
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            auto idx = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
            idx = std::min(idx, attr.categories.size() - 1);
            builder.push(attr.categories[idx].value);
        }
        columns.push_back(std::move(builder).build());
    }
    return Dataset(AttributeSchema(std::move(names)), std::move(columns));
}

std::string spec_to_json(const SyntheticSpec& spec) {
    nlohmann::ordered_json j;
    j["rows"] = spec.rows;
    j["seed"] = spec.seed;
    j["synthetic"] = true;
    j["prng"] = kPrngName;
    auto& attrs = j["attributes"] = nlohmann::ordered_json::array();
    for (const auto& a : spec.attributes) {
        nlohmann::ordered_json cats = nlohmann::ordered_json::array();
        for (const auto& c : a.categories) {
            cats.push_back({{"value", c.value}, {"p", c.p}});
        }
        attrs.push_back({{"name", a.name}, {"categories", std::move(cats)}});
    }
    return j.dump(2) + "\n";
}

SyntheticSpec spec_from_json(std::string_view text) {
    SyntheticSpec spec;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_object()) invalid("spec must be a JSON object");
        const auto& rows = j.at("rows");
        if (!rows.is_number_integer() || rows.get<std::int64_t>() < 0) invalid("rows must be a nonnegative integer");
        spec.rows = rows.get<std::uint64_t>();
        const auto& seed = j.at("seed");
        if (!seed.is_number_integer()) invalid("seed must be an integer");
        spec.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                              : static_cast<std::uint64_t>(seed.get<std::int64_t>());
        if (j.contains("prng") && j.at("prng").get<std::string>() != kPrngName) {
            invalid("unsupported prng '" + j.at("prng").get<std::string>() + "'");
        }
        for (const auto& a : j.at("attributes")) {
            CategoricalAttribute attr;
            attr.name = a.at("name").get<std::string>();
            for (const auto& c : a.at("categories")) {
                attr.categories.push_back({c.at("value").get<std::string>(), c.at("p").get<double>()});
            }
            spec.attributes.push_back(std::move(attr));
        }
    } catch (const nlohmann::json::exception& e) {
        invalid(std::string("malformed spec JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

SyntheticSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, "cannot open spec file: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return spec_from_json(text);
}

} // namespace freqbench
