#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "p2a/util.hpp"

using namespace p2a;

namespace {

std::string temp_path(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "p2a_util_test";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("trim and split") {
    CHECK(trim("  a b \t") == "a b");
    CHECK(trim("") == "");
    CHECK(trim("\r\n") == "");
    auto parts = split("a, b ,,c", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[0] == "a");
    CHECK(parts[1] == " b ");
    CHECK(parts[2] == "");
    CHECK(parts[3] == "c");
    CHECK(split("", ',').size() == 1);
}

TEST_CASE("fmt_double round-trips exactly") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1.918e8, 1.2e-3, 2.0 / 3.0, 1e300, -4.9406564584124654e-324,
                     1.8756372549019608e7}) {
        std::string s = fmt_double(v);
        CHECK(parse_double(s, "v") == v);
    }
}

TEST_CASE("parse_double rejects junk") {
    CHECK_THROWS_AS(parse_double("12x", "f"), Error);
    CHECK_THROWS_AS(parse_double("", "f"), Error);
    CHECK_THROWS_AS(parse_double("nan and more", "f"), Error);
    CHECK(parse_double(" 42 ", "f") == 42.0);
}

TEST_CASE("KvFile parses flat key=value with comments") {
    KvFile kv = KvFile::parse_text(
        "# header comment\n"
        "alpha = 1.5\n"
        "name = hello world\n"
        "\n"
        "quoted = \"a b\"\n",
        "inline");
    CHECK(kv.has("alpha"));
    CHECK(kv.get_double("alpha") == 1.5);
    CHECK(kv.get("name") == "hello world");
    CHECK(kv.get("quoted") == "a b");
    CHECK_FALSE(kv.has("missing"));
    CHECK_THROWS_AS(kv.get("missing"), Error);
    CHECK(kv.entries.size() == 3);
}

TEST_CASE("KvFile rejects malformed input") {
    CHECK_THROWS_AS(KvFile::parse_text("a = 1\na = 2\n", "dup"), ParseError);
    CHECK_THROWS_AS(KvFile::parse_text("no equals sign\n", "bad"), ParseError);
}

TEST_CASE("Csv parses and validates row widths") {
    Csv csv = Csv::parse_text("a,b,c\n1,2,3\n4,5,6\n", "inline");
    REQUIRE(csv.header.size() == 3);
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[1][2] == "6");
    int col = csv.column("b");
    REQUIRE(col == 1);
    CHECK(csv.rows[0][static_cast<size_t>(col)] == "2");
    CHECK(csv.column("zz") == -1);
    CHECK_THROWS_AS(Csv::parse_text("a,b\n1\n", "ragged"), ParseError);
}

TEST_CASE("file io round trip") {
    std::string path = temp_path("roundtrip.txt");
    write_file(path, "line1\nline2\n");
    CHECK(read_file(path) == "line1\nline2\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_file(path), IoError);
}

TEST_CASE("fnv1a is stable") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("abc") == 0xe71fa2190541574bull);
    CHECK(fnv1a("abc") == fnv1a(std::string("abc")));
    CHECK(fnv1a("abd") != fnv1a("abc"));
}
