#include "test_support.hpp"

#include "freqbench/error.hpp"
#include "freqbench/synth.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace freqbench;
using namespace freqbench::testing;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected freqbench::Error");
    return ErrorKind::IoError;
}

} // namespace

TEST_CASE("minimal file loads one column") {
    TempDir dir;
    const auto ds = load_delimited(dir.write("d.csv", "sex\nM\nF"), {',', true});
    CHECK(ds.schema().names() == std::vector<std::string>{"sex"});
    CHECK(ds.row_count() == 2);
    CHECK(ds.column("sex").to_vector() == std::vector<std::string>{"M", "F"});
}

TEST_CASE("header-only input is EmptyInput") {
    CHECK(kind_of([] { parse_delimited("a,b,c\n"); }) == ErrorKind::EmptyInput);
    CHECK(kind_of([] { parse_delimited(""); }) == ErrorKind::EmptyInput);
    CHECK(kind_of([] { parse_delimited("\n\n"); }) == ErrorKind::EmptyInput);
}

TEST_CASE("missing file is FileNotFound") {
    TempDir dir;
    CHECK(kind_of([&] { load_delimited(dir / "nope.csv"); }) == ErrorKind::FileNotFound);
}

TEST_CASE("field count mismatch reports the 1-based line") {
    try {
        parse_delimited("a,b\n1,2\n3\n4,5\n");
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedRow);
        REQUIRE(e.line().has_value());
        CHECK(*e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("line numbers account for quoted newlines and blank lines") {
    try {
        parse_delimited("a,b\n\"x\ny\",2\n\n1,2,3\n");
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedRow);
        CHECK(e.line() == std::optional<std::size_t>(5));
    }
}

TEST_CASE("unterminated quote is MalformedRow") {
    CHECK(kind_of([] { parse_delimited("a\n\"open\n"); }) == ErrorKind::MalformedRow);
}

TEST_CASE("invalid UTF-8 is EncodingError") {
    CHECK(kind_of([] { parse_delimited("a\n\xff\n"); }) == ErrorKind::EncodingError);
    CHECK(kind_of([] { parse_delimited("a\n\xC0\xAF\n"); }) == ErrorKind::EncodingError);  // overlong
    CHECK(kind_of([] { parse_delimited("a\n\xED\xA0\x80\n"); }) == ErrorKind::EncodingError);  // surrogate
    CHECK(parse_delimited("a\nñandú\n").column("a")[0] == "ñandú");
}

TEST_CASE("CRLF, BOM and whitespace normalization") {
    const auto ds = parse_delimited("\xEF\xBB\xBFname , value\r\n  x ,\r\nyy,  \t\r\n");
    CHECK(ds.schema().names() == std::vector<std::string>{"name", "value"});
    CHECK(ds.column("name").to_vector() == std::vector<std::string>{"x", "yy"});
    CHECK(ds.column("value").to_vector() == std::vector<std::string>{"(empty)", "(empty)"});
}

TEST_CASE("quoted fields with delimiters, doubled quotes and newlines") {
    const auto ds = parse_delimited("a,b\n\"x,y\",\"say \"\"hi\"\"\"\n\"multi\nline\",plain\n");
    CHECK(ds.row_count() == 2);
    CHECK(ds.column("a").to_vector() == std::vector<std::string>{"x,y", "multi\nline"});
    CHECK(ds.column("b").to_vector() == std::vector<std::string>{"say \"hi\"", "plain"});
}

TEST_CASE("headerless input synthesizes attr_ names") {
    const auto ds = parse_delimited("1;2\n3;4\n", {';', false});
    CHECK(ds.schema().names() == std::vector<std::string>{"attr_1", "attr_2"});
    CHECK(ds.row_count() == 2);
    CHECK(ds.column("attr_2").to_vector() == std::vector<std::string>{"2", "4"});
}

TEST_CASE("duplicate or empty header names are rejected") {
    CHECK(kind_of([] { parse_delimited("a,a\n1,2\n"); }) == ErrorKind::InvalidSchema);
    CHECK(kind_of([] { parse_delimited("a,\n1,2\n"); }) == ErrorKind::InvalidSchema);
}

TEST_CASE("column lookup") {
    const auto ds = parse_delimited("sex\nM\nF\n");
    CHECK(ds.column("sex").to_vector() == std::vector<std::string>{"M", "F"});
    try {
        ds.column("age");
        FAIL("expected UnknownAttribute");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownAttribute);
        CHECK(std::string(e.what()).find("available: sex") != std::string::npos);
    }
}

TEST_CASE("dataset constructor rejects ragged columns") {
    CHECK(kind_of([] { make_dataset({"a", "b"}, {{"1", "2"}, {"1"}}); }) == ErrorKind::InvalidSchema);
}

TEST_CASE("property: write then load reproduces the dataset") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> alphabet = {"a", "B", ",", "\"", "\n", " ", "é", "x y", ";", "\r\n", "(empty)"};
    for (int iter = 0; iter < 150; ++iter) {
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const std::size_t attrs = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        std::vector<std::string> names;
        std::vector<std::vector<std::string>> cols(attrs);
        for (std::size_t a = 0; a < attrs; ++a) {
            names.push_back("col " + std::to_string(a) + (a % 2 ? ",x" : ""));
            for (std::size_t r = 0; r < rows; ++r) {
                std::string v;
                const int len = std::uniform_int_distribution<int>(1, 4)(rng);
                for (int i = 0; i < len; ++i) {
                    v += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
                }
                cols[a].emplace_back(normalize_field(v));
            }
        }
        const auto ds = make_dataset(names, cols);
        const char delim = iter % 3 == 0 ? ';' : ',';
        std::ostringstream out;
        write_delimited(ds, out, delim);
        const auto reloaded = parse_delimited(out.str(), {delim, true});
        REQUIRE(reloaded == ds);
        // Determinism: loading the same bytes twice yields equal datasets.
        CHECK(parse_delimited(out.str(), {delim, true}) == reloaded);
    }
}

TEST_CASE("writer quotes only when required") {
    const auto ds = make_dataset({"a", "b"}, {{"plain", "has,comma"}, {"q\"uote", "ok"}});
    std::ostringstream out;
    write_delimited(ds, out);
    CHECK(out.str() == "a,b\nplain,\"q\"\"uote\"\n\"has,comma\",ok\n");
}

TEST_CASE("500k generated rows load with the expected shape") {
    TempDir dir;
    const auto spec = default_vitals_spec(500000, 42);
    const auto path = dir / "vitals.csv";
    write_delimited(generate(spec), path);
    CHECK(count_lines(path) == 500001);
    const auto ds = load_delimited(path);
    CHECK(ds.row_count() == 500000);
    CHECK(ds.attribute_count() == 9);
    CHECK(ds.column("vital_event").size() == spec.rows);

    // Conservation through an independent counting route.
    std::uint64_t total = 0;
    for (const auto& [_, n] : oracle_counts(ds.column("sex"))) total += n;
    CHECK(total == ds.row_count());
}
