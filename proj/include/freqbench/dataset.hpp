#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace freqbench {

/// Value stored for a field that is empty after whitespace trimming.
inline constexpr std::string_view kEmptySentinel = "(empty)";

/// Ordered, duplicate-free list of attribute (column) names.
class AttributeSchema {
public:
    AttributeSchema() = default;
    explicit AttributeSchema(std::vector<std::string> names);

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    /// Position of `name`, or throws UnknownAttribute listing the known names.
    std::size_t index_of(std::string_view name) const;
    bool contains(std::string_view name) const noexcept;

    friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;

private:
    std::vector<std::string> names_;
};

/// One attribute's values packed into a single buffer. Elements are
/// views into that buffer and live as long as the Column does.
class Column {
public:
    class Builder {
    public:
        void reserve(std::size_t rows, std::size_t bytes);
        void push(std::string_view value);
        std::size_t size() const noexcept { return offsets_.size() - 1; }
        Column build() &&;

    private:
        std::string bytes_;
        std::vector<std::uint64_t> offsets_{0};
    };

    Column() = default;

    std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    bool empty() const noexcept { return size() == 0; }

    std::string_view operator[](std::size_t row) const noexcept {
        return {bytes_.data() + offsets_[row], static_cast<std::size_t>(offsets_[row + 1] - offsets_[row])};
    }

    std::vector<std::string> to_vector() const;

    friend bool operator==(const Column&, const Column&) = default;

private:
    std::string bytes_;
    std::vector<std::uint64_t> offsets_;
};

/// Immutable column-major table of categorical text values.
class Dataset {
public:
    Dataset() = default;
    /// Throws InvalidSchema when the column count or any column length disagrees.
    Dataset(AttributeSchema schema, std::vector<Column> columns);

    const AttributeSchema& schema() const noexcept { return schema_; }
    std::size_t row_count() const noexcept { return row_count_; }
    std::size_t attribute_count() const noexcept { return schema_.size(); }

    /// Throws UnknownAttribute.
    const Column& column(std::string_view name) const;
    const Column& column_at(std::size_t index) const { return columns_.at(index); }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    AttributeSchema schema_;
    std::vector<Column> columns_;
    std::size_t row_count_ = 0;
};

struct DelimitedOptions {
    char delimiter = ',';
    bool has_header = true;
};

/// Trims surrounding whitespace and maps empty results to kEmptySentinel.
std::string_view normalize_field(std::string_view raw) noexcept;

/// Parses delimited text already in memory. Supports RFC-4180 quoting,
/// LF/CRLF line endings and a leading UTF-8 BOM. Blank lines are skipped.
Dataset parse_delimited(std::string_view text, const DelimitedOptions& options = {});

/// Reads and parses a file. Throws FileNotFound, MalformedRow, EmptyInput or EncodingError.
Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options = {});

/// Writes with LF endings, quoting only fields that need it. The header row is always written.
void write_delimited(const Dataset& ds, std::ostream& out, char delimiter = ',');
void write_delimited(const Dataset& ds, const std::filesystem::path& path, char delimiter = ',');

bool is_valid_utf8(std::string_view bytes) noexcept;

} // namespace freqbench
