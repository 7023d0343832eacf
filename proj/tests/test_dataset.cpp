#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "bnpcms/dataset.hpp"
#include "bnpcms/hashing.hpp"

using namespace bnpcms;

TEST_CASE("zipf_pmf normalizes with the right decay") {
    std::vector<double> p = zipf_pmf(1.3, 1000);
    REQUIRE(p.size() == 1000);
    double total = 0.0;
    for (double v : p) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[0] / p[1] == doctest::Approx(std::pow(2.0, 1.3)).epsilon(1e-12));
    CHECK(p[9] / p[99] == doctest::Approx(std::pow(10.0, 1.3)).epsilon(1e-11));
    CHECK_THROWS_AS(zipf_pmf(1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(zipf_pmf(2.0, 0), std::invalid_argument);
}

TEST_CASE("generate_zipf is deterministic, in range, and follows the pmf") {
    std::vector<std::uint64_t> a = generate_zipf(2.0, 20000, 1000, 4);
    std::vector<std::uint64_t> b = generate_zipf(2.0, 20000, 1000, 4);
    CHECK(a == b);
    std::vector<std::uint64_t> c = generate_zipf(2.0, 20000, 1000, 5);
    CHECK(a != c);
    REQUIRE(a.size() == 20000);
    std::uint64_t ones = 0;
    for (std::uint64_t r : a) {
        CHECK(r >= 1);
        CHECK(r <= 1000);
        if (r == 1) ++ones;
    }
    double p1 = zipf_pmf(2.0, 1000)[0];
    double sigma = std::sqrt(20000.0 * p1 * (1.0 - p1));
    CHECK(std::abs(static_cast<double>(ones) - 20000.0 * p1) < 3.5 * sigma);
}

TEST_CASE("token streams lowercase and split on whitespace") {
    std::istringstream in("The the\nTHE\napple\r\n\n  pear  plum\n");
    std::vector<std::uint64_t> ids = read_token_stream(in);
    REQUIRE(ids.size() == 6);
    CHECK(ids[0] == tokenize("the"));
    CHECK(ids[1] == tokenize("the"));
    CHECK(ids[2] == tokenize("the"));
    CHECK(ids[3] == tokenize("apple"));
    CHECK(ids[4] == tokenize("pear"));
    CHECK(ids[5] == tokenize("plum"));

    std::istringstream empty("");
    CHECK(read_token_stream(empty).empty());
}

TEST_CASE("UCI bag-of-words expands triples in order") {
    std::istringstream in("2\n3\n3\n1 1 2\n1 2 1\n2 3 1\n");
    std::vector<std::uint64_t> ids = read_uci_bow(in);
    REQUIRE(ids.size() == 4);
    CHECK(ids[0] == tokenize("1"));
    CHECK(ids[1] == tokenize("1"));
    CHECK(ids[2] == tokenize("2"));
    CHECK(ids[3] == tokenize("3"));
}

TEST_CASE("UCI reader tolerates blank lines") {
    std::istringstream in("\n2\n3\n2\n\n1 1 1\n2 2 1\n\n");
    std::vector<std::uint64_t> ids = read_uci_bow(in);
    REQUIRE(ids.size() == 2);
}

TEST_CASE("UCI reader reports malformed input with line numbers") {
    auto what_contains = [](auto fn, const std::string& needle) {
        try {
            fn();
        } catch (const IoError& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    // non-numeric header
    CHECK(what_contains(
        [] {
            std::istringstream in("x\n3\n1\n1 1 1\n");
            read_uci_bow(in);
        },
        "line 1"));
    // triple with trailing garbage
    CHECK(what_contains(
        [] {
            std::istringstream in("1\n1\n1\n1 1 1 9\n");
            read_uci_bow(in);
        },
        "line 4"));
    // zero count
    CHECK(what_contains(
        [] {
            std::istringstream in("1\n1\n1\n1 1 0\n");
            read_uci_bow(in);
        },
        "line 4"));
    // fewer triples than the header declares
    CHECK_THROWS_AS(
        [] {
            std::istringstream in("1\n2\n2\n1 1 1\n");
            read_uci_bow(in);
        }(),
        IoError);
    // more triples than declared
    CHECK_THROWS_AS(
        [] {
            std::istringstream in("1\n2\n1\n1 1 1\n1 2 1\n");
            read_uci_bow(in);
        }(),
        IoError);
}

TEST_CASE("write_lines emits one decimal value per line") {
    std::ostringstream out;
    std::vector<std::uint64_t> values{3, 1, 4, 15};
    write_lines(out, values);
    CHECK(out.str() == "3\n1\n4\n15\n");
}
