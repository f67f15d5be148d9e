#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "netabc/error.hpp"
#include "netabc/kvfile.hpp"

using namespace netabc;

TEST_SUITE("kvfile")
{
    TEST_CASE("parse ignores comments and blank lines")
    {
        const KeyValues kv = KeyValues::parse("# header\n\nseed = 42\n  name =  a b  \nrate=0.5\n", "cfg");
        CHECK(kv.entries().size() == 3);
        CHECK(kv.require_int("seed") == 42);
        CHECK(kv.require("name") == "a b");
        CHECK(kv.require_double("rate") == 0.5);
        CHECK_FALSE(kv.contains("missing"));
        CHECK_FALSE(kv.get("missing"));
        CHECK(kv.source() == "cfg");
    }

    TEST_CASE("malformed records name their source")
    {
        CHECK_THROWS_AS(KeyValues::parse("no equals sign\n"), IoError);
        CHECK_THROWS_AS(KeyValues::parse("a = 1\na = 2\n"), IoError);
        CHECK_THROWS_AS(KeyValues::parse(" = 1\n"), IoError);
        const KeyValues kv = KeyValues::parse("x = abc\nneg = -3\n", "file.txt");
        try {
            (void)kv.require_double("x");
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("file.txt") != std::string::npos);
        }
        CHECK_THROWS_AS(kv.require("y"), IoError);
        CHECK_THROWS_AS(kv.require_uint("neg"), IoError);
        CHECK_THROWS_AS(kv.require_int("x"), IoError);
    }

    TEST_CASE("to_text round-trips")
    {
        KeyValues kv;
        kv.set("a", std::string("text"));
        kv.set("b", 0.1);
        kv.set("c", std::int64_t{-7});
        kv.set("a", std::string("replaced"));
        const KeyValues back = KeyValues::parse(kv.to_text());
        CHECK(back.entries() == kv.entries());
        CHECK(back.require("a") == "replaced");
        CHECK(back.entries().front().first == "a");
    }

    TEST_CASE("format_double is shortest and exact")
    {
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(203.0) == "203");
        for (const double v : {1.0 / 3.0, 6.02214076e23, 5e-324, -0.0, 0.6407}) {
            CHECK(parse_double(format_double(v)) == v);
        }
        CHECK_THROWS(parse_double("1.0x"));
        CHECK_THROWS(parse_double(""));
        CHECK(parse_int("-12") == -12);
        CHECK_THROWS(parse_int("1.5"));
    }

    TEST_CASE("FNV-1a reference vectors")
    {
        CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    }

    TEST_CASE("atomic write then read")
    {
        const auto dir = std::filesystem::temp_directory_path() / "netabc-kv-test";
        std::filesystem::create_directories(dir);
        const auto path = dir / "x.txt";
        write_file_atomic(path, "k = v\n");
        CHECK(read_file(path) == "k = v\n");
        CHECK_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
        CHECK(KeyValues::load(path).require("k") == "v");
        CHECK_THROWS_AS(read_file(dir / "absent.txt"), IoError);
        std::filesystem::remove_all(dir);
    }
}
