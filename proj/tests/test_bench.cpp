#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "bnpcms/bench.hpp"
#include "bnpcms/dataset.hpp"
#include "bnpcms/hashing.hpp"

using namespace bnpcms;

namespace {

struct Fixture {
    std::vector<std::uint64_t> tokens;
    SketchMatrix sketch;
    std::unordered_map<std::uint64_t, std::uint64_t> truth;

    explicit Fixture(std::uint64_t m = 3000, std::uint32_t j = 32, std::uint32_t n = 2)
        : sketch(draw_family(n, j, 91)) {
        for (std::uint64_t r : generate_zipf(1.5, m, 2000, 7))
            tokens.push_back(tokenize(std::to_string(r)));
        for (std::uint64_t t : tokens) sketch.update(t);
        truth = exact_counts(tokens);
    }
};

}  // namespace

TEST_CASE("estimator names round-trip and reject junk") {
    for (Estimator e : {Estimator::kCms, Estimator::kCmm, Estimator::kDpMean,
                        Estimator::kDpMedian, Estimator::kDpMode, Estimator::kPypMean,
                        Estimator::kPypMedian, Estimator::kPypMode, Estimator::kTruth}) {
        CHECK(parse_estimator(estimator_name(e)) == e);
    }
    CHECK_THROWS_AS(parse_estimator("dp_mean"), std::invalid_argument);
    CHECK_THROWS_AS(parse_estimator(""), std::invalid_argument);
    CHECK(estimator_needs_dp(Estimator::kDpMedian));
    CHECK_FALSE(estimator_needs_dp(Estimator::kPypMean));
    CHECK(estimator_needs_pyp(Estimator::kPypMode));
    CHECK_FALSE(estimator_needs_pyp(Estimator::kCms));
}

TEST_CASE("bins cover (0,1] through (128,256] by doubling") {
    auto bins = bench_bins();
    REQUIRE(bins.size() == 9);
    CHECK(bins[0].lo == 0);
    CHECK(bins[0].hi == 1);
    CHECK(bins[1].lo == 1);
    CHECK(bins[1].hi == 2);
    for (std::size_t i = 2; i < bins.size(); ++i) {
        CHECK(bins[i].lo == bins[i - 1].hi);
        CHECK(bins[i].hi == 2 * bins[i].lo);
    }
    CHECK(bins.back().hi == 256);
}

TEST_CASE("exact_counts tallies a hand stream") {
    std::vector<std::uint64_t> s{5, 9, 5, 5, 9, 2};
    auto counts = exact_counts(s);
    REQUIRE(counts.size() == 3);
    CHECK(counts.at(5) == 3);
    CHECK(counts.at(9) == 2);
    CHECK(counts.at(2) == 1);
}

TEST_CASE("truth estimator has zero error and cms respects its bias") {
    Fixture f;
    BenchOptions options;
    options.threads = 1;
    std::vector<Estimator> estimators{Estimator::kTruth, Estimator::kCms,
                                      Estimator::kCmm};
    BinnedMaeReport report = binned_mae(f.sketch, f.truth, estimators, options);
    REQUIRE(report.estimators.size() == 3);
    CHECK(report.estimators[0] == "truth");
    REQUIRE(report.mae.size() == 9);
    std::uint64_t total_tokens = 0;
    for (std::size_t b = 0; b < 9; ++b) {
        total_tokens += report.bin_tokens[b];
        CHECK(report.mae[b][0] == doctest::Approx(0.0));
        CHECK(report.mae[b][1] >= 0.0);
    }
    CHECK(total_tokens > 0);
    // every truth count <= 256 lands in exactly one bin
    std::uint64_t expect = 0;
    for (const auto& [token, count] : f.truth)
        if (count <= 256) ++expect;
    CHECK(total_tokens == expect);
}

TEST_CASE("posterior estimators run and order sanely on a zipf stream") {
    Fixture f;
    BenchOptions options;
    options.has_dp = true;
    options.dp_theta = 5.0;
    options.has_pyp = true;
    options.pyp = {0.5, 5.0};
    options.threads = 2;
    std::vector<Estimator> estimators{Estimator::kCms, Estimator::kDpMean,
                                      Estimator::kPypMean};
    BinnedMaeReport report = binned_mae(f.sketch, f.truth, estimators, options);
    // the corrected estimators beat raw cms on the rarest bin
    CHECK(report.bin_tokens[0] > 50);
    CHECK(report.mae[0][1] < report.mae[0][0]);
    CHECK(report.mae[0][2] < report.mae[0][0]);
}

TEST_CASE("reports are identical across thread counts") {
    Fixture f(2000, 24, 2);
    std::vector<Estimator> estimators{Estimator::kCms, Estimator::kDpMean,
                                      Estimator::kPypMean};
    BenchOptions options;
    options.has_dp = true;
    options.dp_theta = 3.0;
    options.has_pyp = true;
    options.pyp = {0.4, 3.0};
    options.threads = 1;
    BinnedMaeReport one = binned_mae(f.sketch, f.truth, estimators, options);
    options.threads = 4;
    BinnedMaeReport four = binned_mae(f.sketch, f.truth, estimators, options);
    CHECK(one.csv() == four.csv());
    CHECK(one.text_table() == four.text_table());
}

TEST_CASE("sample_cap limits and fixes the queried set") {
    Fixture f(2000, 24, 2);
    BenchOptions options;
    options.threads = 1;
    options.sample_cap = 25;
    options.seed = 3;
    std::vector<Estimator> estimators{Estimator::kCms};
    BinnedMaeReport a = binned_mae(f.sketch, f.truth, estimators, options);
    BinnedMaeReport b = binned_mae(f.sketch, f.truth, estimators, options);
    std::uint64_t total = 0;
    for (std::uint64_t n : a.bin_tokens) total += n;
    CHECK(total <= 25);
    CHECK(total > 0);
    CHECK(a.csv() == b.csv());
}

TEST_CASE("missing model parameters are rejected") {
    Fixture f(500, 16, 2);
    BenchOptions options;
    options.threads = 1;
    std::vector<Estimator> dp{Estimator::kDpMean};
    CHECK_THROWS_AS(binned_mae(f.sketch, f.truth, dp, options), std::invalid_argument);
    std::vector<Estimator> pyp{Estimator::kPypMedian};
    CHECK_THROWS_AS(binned_mae(f.sketch, f.truth, pyp, options), std::invalid_argument);
}

TEST_CASE("csv and text table carry one row per bin") {
    Fixture f(800, 16, 2);
    BenchOptions options;
    options.threads = 1;
    std::vector<Estimator> estimators{Estimator::kCms, Estimator::kCmm};
    BinnedMaeReport report = binned_mae(f.sketch, f.truth, estimators, options);
    std::string csv = report.csv();
    std::size_t lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 10);  // header + 9 bins
    CHECK(csv.find("cms") != std::string::npos);
    CHECK(csv.find("cmm") != std::string::npos);
    std::string table = report.text_table();
    CHECK(table.find("(0,1]") != std::string::npos);
    CHECK(table.find("(128,256]") != std::string::npos);
}
