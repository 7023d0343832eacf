#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/enumeration_oracle.hpp"
#include "bnpcms/posterior_dp.hpp"
#include "bnpcms/sketch.hpp"

using namespace bnpcms;

TEST_CASE("c = 0 is a point mass at zero") {
    PosteriorPmf pmf = dp_posterior_single(3.0, 8, 0);
    REQUIRE(pmf.log_probs.size() == 1);
    CHECK(pmf.prob(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed-form values at small counts") {
    // theta = 2, J = 2 gives a = 1: the posterior is uniform on 0..c
    for (std::uint64_t c : {1, 4, 9}) {
        PosteriorPmf pmf = dp_posterior_single(2.0, 2, c);
        REQUIRE(pmf.log_probs.size() == c + 1);
        for (std::uint64_t l = 0; l <= c; ++l)
            CHECK(pmf.prob(l) == doctest::Approx(1.0 / (c + 1.0)).epsilon(1e-12));
    }
    // a = theta/J = 0.5, c = 1: p(0) = a/(a+1) = 1/3, p(1) = 2/3
    PosteriorPmf pmf = dp_posterior_single(1.0, 2, 1);
    CHECK(pmf.prob(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(pmf.prob(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("raw log pmf is analytically normalized") {
    for (double theta : {0.3, 2.0, 40.0}) {
        for (std::uint32_t j : {2u, 17u, 320u}) {
            for (std::uint64_t c : {1, 10, 500}) {
                std::vector<double> lp = dp_posterior_log_pmf(theta, j, c);
                double total = 0.0;
                for (double v : lp) total += std::exp(v);
                CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("single-hash posterior matches the enumeration oracle") {
    for (double theta : {0.5, 1.0, 5.0}) {
        for (std::uint32_t j : {2u, 3u}) {
            for (std::uint64_t m : {3, 6}) {
                OracleTable t = enumeration_oracle(m, j, PypParams{0.0, theta});
                for (std::uint64_t c = 0; c <= m; ++c) {
                    if (t.counts_marginal(c) < 1e-14) continue;
                    std::vector<double> cond = t.conditional(c);
                    PosteriorPmf pmf = dp_posterior_single(theta, j, c);
                    for (std::uint64_t l = 0; l <= m; ++l) {
                        double expect = l <= c ? pmf.prob(l) : 0.0;
                        CHECK(cond[l] == doctest::Approx(expect).epsilon(5e-11));
                    }
                }
            }
        }
    }
}

TEST_CASE("the posterior never depends on m, only on the bucket count") {
    // Theorem-1 structure: conditioning on one bucket's count screens off
    // the rest of the stream
    OracleTable small = enumeration_oracle(4, 2, PypParams{0.0, 2.0});
    OracleTable large = enumeration_oracle(7, 2, PypParams{0.0, 2.0});
    std::vector<double> cond4 = small.conditional(3);
    std::vector<double> cond7 = large.conditional(3);
    for (std::uint64_t l = 0; l <= 3; ++l)
        CHECK(cond4[l] == doctest::Approx(cond7[l]).epsilon(1e-11));
}

TEST_CASE("posterior mean grows with the count") {
    double prev = -1.0;
    for (std::uint64_t c = 0; c <= 40; c += 4) {
        double mean = posterior_summary(dp_posterior_single(5.0, 10, c), SummaryKind::kMean);
        CHECK(mean > prev);
        CHECK(mean <= static_cast<double>(c));
        prev = mean;
    }
}

TEST_CASE("mode sits at c when theta/J < 1 and at 0 when theta/J > 1") {
    PosteriorPmf light = dp_posterior_single(0.5, 2, 7);  // a = 0.25
    CHECK(posterior_summary(light, SummaryKind::kMode) == doctest::Approx(7.0));
    PosteriorPmf heavy = dp_posterior_single(10.0, 2, 7);  // a = 5
    CHECK(posterior_summary(heavy, SummaryKind::kMode) == doctest::Approx(0.0));
}

TEST_CASE("multi-hash forms on the documented m = 2 example") {
    // m = 2, J = 2, theta = 2, both rows report c = 2. The exact joint
    // posterior (enumeration over partitions and buckets) is
    // [3/15, 4/15, 8/15]; both product forms deviate from it because the
    // rows share one latent partition.
    OracleTable t = enumeration_oracle(2, 2, PypParams{0.0, 2.0}, 1, 2);
    std::vector<double> truth = t.conditional(2 * 3 + 2);
    CHECK(truth[0] == doctest::Approx(3.0 / 15.0).epsilon(1e-11));
    CHECK(truth[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-11));
    CHECK(truth[2] == doctest::Approx(8.0 / 15.0).epsilon(1e-11));

    HashedRow row{{2, 2}};
    PosteriorPmf prop = dp_posterior_multi(2.0, 2, row, MultiHashForm::kProportional);
    // each single-hash posterior is uniform (a = 1), so the product is too
    for (std::uint64_t l = 0; l <= 2; ++l)
        CHECK(prop.prob(l) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    PosteriorPmf corr =
        dp_posterior_multi(2.0, 2, row, MultiHashForm::kPriorCorrected, 2);
    CHECK(corr.prob(0) == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
    CHECK(corr.prob(1) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
    CHECK(corr.prob(2) == doctest::Approx(6.0 / 11.0).epsilon(1e-12));

    // neither form reproduces the true joint posterior
    CHECK(std::abs(prop.prob(2) - truth[2]) > 0.05);
    CHECK(std::abs(corr.prob(2) - truth[2]) > 0.01);
}

TEST_CASE("prior-corrected form is exact at m = 1, where rows decouple") {
    OracleTable t = enumeration_oracle(1, 2, PypParams{0.0, 2.0}, 1, 2);
    std::vector<double> truth = t.conditional(1 * 2 + 1);  // counts (1, 1)
    HashedRow row{{1, 1}};
    PosteriorPmf corr =
        dp_posterior_multi(2.0, 2, row, MultiHashForm::kPriorCorrected, 1);
    for (std::uint64_t l = 0; l <= 1; ++l)
        CHECK(corr.prob(l) == doctest::Approx(truth[l]).epsilon(1e-11));
    // and the plain product is not
    PosteriorPmf prop = dp_posterior_multi(2.0, 2, row, MultiHashForm::kProportional);
    CHECK(std::abs(prop.prob(1) - truth[1]) > 0.05);
}

TEST_CASE("multi-hash support is the minimum count") {
    HashedRow row{{5, 3, 9}};
    PosteriorPmf pmf = dp_posterior_multi(1.0, 4, row);
    CHECK(pmf.support_max() == 3);
    // one row reproduces the single-hash posterior
    HashedRow one{{6}};
    PosteriorPmf multi = dp_posterior_multi(1.5, 4, one);
    PosteriorPmf single = dp_posterior_single(1.5, 4, 6);
    REQUIRE(multi.log_probs.size() == single.log_probs.size());
    for (std::size_t l = 0; l < single.log_probs.size(); ++l)
        CHECK(multi.log_probs[l] == doctest::Approx(single.log_probs[l]).epsilon(1e-13));
}

TEST_CASE("prior correction without m is rejected") {
    HashedRow row{{2, 2}};
    CHECK_THROWS_AS(dp_posterior_multi(1.0, 2, row, MultiHashForm::kPriorCorrected),
                    std::invalid_argument);
}

TEST_CASE("empirical-Bayes theta lands at a local maximum and near truth") {
    StreamSample s = sample_stream(20000, PypParams{0.0, 20.0}, 42);
    SketchMatrix sketch(draw_family(2, 64, 4242));
    for (std::uint64_t t : s.tokens) sketch.update(t);
    double theta_hat = fit_theta_empirical_bayes(sketch);
    CHECK(theta_hat > 5.0);
    CHECK(theta_hat < 80.0);
    double at_hat = dm_log_likelihood(sketch, theta_hat);
    CHECK(at_hat >= dm_log_likelihood(sketch, theta_hat * 1.6));
    CHECK(at_hat >= dm_log_likelihood(sketch, theta_hat / 1.6));
}
