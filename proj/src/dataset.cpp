#include "freqbench/dataset.hpp"

#include "freqbench/error.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace freqbench {

// ---------------------------------------------------------------------------
// AttributeSchema

AttributeSchema::AttributeSchema(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) {
            throw Error(ErrorKind::InvalidSchema, "attribute " + std::to_string(i + 1) + " has an empty name");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (names_[j] == names_[i]) {
                throw Error(ErrorKind::InvalidSchema, "duplicate attribute name '" + names_[i] + "'");
            }
        }
    }
}

std::size_t AttributeSchema::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it != names_.end()) {
        return static_cast<std::size_t>(it - names_.begin());
    }
    std::string available;
    for (const auto& n : names_) {
        if (!available.empty()) available += ", ";
        available += n;
    }
    throw Error(ErrorKind::UnknownAttribute,
                "unknown attribute '" + std::string(name) + "' (available: " + available + ")");
}

bool AttributeSchema::contains(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

// ---------------------------------------------------------------------------
// Column

void Column::Builder::reserve(std::size_t rows, std::size_t bytes) {
    offsets_.reserve(rows + 1);
    bytes_.reserve(bytes);
}

void Column::Builder::push(std::string_view value) {
    bytes_.append(value);
    offsets_.push_back(bytes_.size());
}

Column Column::Builder::build() && {
    Column c;
    c.bytes_ = std::move(bytes_);
    c.offsets_ = std::move(offsets_);
    bytes_.clear();
    offsets_.assign(1, 0);
    return c;
}

std::vector<std::string> Column::to_vector() const {
    std::vector<std::string> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out.emplace_back((*this)[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(AttributeSchema schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (columns_.size() != schema_.size()) {
        throw Error(ErrorKind::InvalidSchema, "schema has " + std::to_string(schema_.size()) +
                                                  " attributes but " + std::to_string(columns_.size()) +
                                                  " columns were supplied");
    }
    row_count_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].size() != row_count_) {
            throw Error(ErrorKind::InvalidSchema, "column '" + schema_.names()[i] + "' has " +
                                                      std::to_string(columns_[i].size()) + " rows, expected " +
                                                      std::to_string(row_count_));
        }
    }
}

const Column& Dataset::column(std::string_view name) const {
    return columns_[schema_.index_of(name)];
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

/// Cursor over delimited text producing one record at a time.
class RecordReader {
public:
    RecordReader(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

    /// Returns false at end of input. Blank lines are skipped.
    bool next(std::vector<std::string>& fields, std::size_t& record_line) {
        while (pos_ < text_.size()) {
            fields.clear();
            record_line = line_;
            if (read_record(fields)) {
                return true;
            }
        }
        return false;
    }

private:
    // Returns false for a blank line.
    bool read_record(std::vector<std::string>& fields) {
        std::string field;
        bool in_quotes = false;
        bool saw_content = false;
        const std::size_t start_line = line_;

        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (in_quotes) {
                if (c == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field.push_back('"');
                        pos_ += 2;
                    } else {
                        in_quotes = false;
                        ++pos_;
                    }
                    continue;
                }
                if (c == '\n') ++line_;
                field.push_back(c);
                ++pos_;
                continue;
            }
            if (c == delim_) {
                fields.push_back(std::move(field));
                field.clear();
                saw_content = true;
                ++pos_;
                continue;
            }
            if (c == '\n' || (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n')) {
                pos_ += (c == '\r') ? 2 : 1;
                ++line_;
                if (!saw_content) return false;
                fields.push_back(std::move(field));
                return true;
            }
            if (c == '"' && std::all_of(field.begin(), field.end(), is_space)) {
                field.clear();
                in_quotes = true;
                saw_content = true;
                ++pos_;
                continue;
            }
            field.push_back(c);
            saw_content = true;
            ++pos_;
        }
        if (in_quotes) {
            throw Error(ErrorKind::MalformedRow,
                        "line " + std::to_string(start_line) + ": unterminated quoted field", start_line);
        }
        if (!saw_content) return false;
        fields.push_back(std::move(field));
        return true;
    }

    std::string_view text_;
    char delim_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::size_t first_invalid_utf8(std::string_view s) noexcept {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char c = p[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            if ((p[i + k] & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (p[i + k] & 0x3F);
        }
        // overlong, surrogate, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return i;
        }
        i += len;
    }
    return n;
}

} // namespace

bool is_valid_utf8(std::string_view bytes) noexcept {
    return first_invalid_utf8(bytes) == bytes.size();
}

std::string_view normalize_field(std::string_view raw) noexcept {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && is_space(raw[b])) ++b;
    while (e > b && is_space(raw[e - 1])) --e;
    if (b == e) return kEmptySentinel;
    return raw.substr(b, e - b);
}

Dataset parse_delimited(std::string_view text, const DelimitedOptions& options) {
    if (const auto bad = first_invalid_utf8(text); bad != text.size()) {
        throw Error(ErrorKind::EncodingError, "line " + std::to_string(line_of_offset(text, bad)) +
                                                  ": input is not valid UTF-8 (byte offset " +
                                                  std::to_string(bad) + ")");
    }
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    RecordReader reader(text, options.delimiter);
    std::vector<std::string> fields;
    std::size_t line = 0;

    if (!reader.next(fields, line)) {
        throw Error(ErrorKind::EmptyInput, "input contains no rows");
    }

    std::vector<std::string> names;
    bool pending_first_row = false;
    if (options.has_header) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto name = normalize_field(fields[i]);
            if (name == kEmptySentinel) {
                throw Error(ErrorKind::InvalidSchema, "header column " + std::to_string(i + 1) + " has an empty name");
            }
            names.emplace_back(name);
        }
    } else {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            names.push_back("attr_" + std::to_string(i + 1));
        }
        pending_first_row = true;
    }
    AttributeSchema schema(std::move(names));
    const std::size_t width = schema.size();

    std::vector<Column::Builder> builders(width);
    const std::size_t approx_rows = std::max<std::size_t>(16, text.size() / (width * 8 + 1));
    for (auto& b : builders) {
        b.reserve(approx_rows, text.size() / width);
    }

    auto append = [&](std::size_t at_line) {
        if (fields.size() != width) {
            throw Error(ErrorKind::MalformedRow,
                        "line " + std::to_string(at_line) + ": expected " + std::to_string(width) +
                            " fields, found " + std::to_string(fields.size()),
                        at_line);
        }
        for (std::size_t i = 0; i < width; ++i) {
            builders[i].push(normalize_field(fields[i]));
        }
    };

    if (pending_first_row) append(line);
    while (reader.next(fields, line)) {
        append(line);
    }
    if (builders.front().size() == 0) {
        throw Error(ErrorKind::EmptyInput, "input has a header but no data rows");
    }

    std::vector<Column> columns;
    columns.reserve(width);
    for (auto& b : builders) {
        columns.push_back(std::move(b).build());
    }
    return Dataset(std::move(schema), std::move(columns));
}

Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorKind::FileNotFound, "file not found: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, "cannot open file: " + path.string());
    }
    std::string text;
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    if (size > 0) {
        text.resize(static_cast<std::size_t>(size));
        in.read(text.data(), size);
    }
    if (!in && !in.eof()) {
        throw Error(ErrorKind::IoError, "failed reading " + path.string());
    }
    return parse_delimited(text, options);
}

// ---------------------------------------------------------------------------
// Writing

namespace {

void write_field(std::ostream& out, std::string_view v, char delimiter) {
    const bool needs_quotes = v.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs_quotes) {
        out << v;
        return;
    }
    out << '"';
    for (char c : v) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

} // namespace

void write_delimited(const Dataset& ds, std::ostream& out, char delimiter) {
    const auto& names = ds.schema().names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << delimiter;
        write_field(out, names[i], delimiter);
    }
    out << '\n';
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        for (std::size_t i = 0; i < ds.attribute_count(); ++i) {
            if (i) out << delimiter;
            write_field(out, ds.column_at(i)[r], delimiter);
        }
        out << '\n';
    }
}

void write_delimited(const Dataset& ds, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
    }
    // Building in memory first is considerably faster than per-field stream writes.
    std::ostringstream buf;
    write_delimited(ds, buf, delimiter);
    const std::string s = std::move(buf).str();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) {
        throw Error(ErrorKind::IoError, "failed writing " + path.string());
    }
}

} // namespace freqbench
