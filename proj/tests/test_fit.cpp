#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/fit.hpp"
#include "bnpcms/rng.hpp"

using namespace bnpcms;

TEST_CASE("wasserstein1 on hand vectors") {
    SummaryVector x{{0.0, 1.0, 2.0}};
    CHECK(wasserstein1(x, x) == doctest::Approx(0.0));
    SummaryVector shifted{{2.5, 1.5, 0.5}};  // x + 0.5, permuted
    CHECK(wasserstein1(x, shifted) == doctest::Approx(0.5).epsilon(1e-14));
    SummaryVector a{{0.0, 1.0}}, b{{1.0, 2.0}};
    CHECK(wasserstein1(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    // symmetric, permutation-invariant
    SummaryVector bp{{2.0, 1.0}};
    CHECK(wasserstein1(b, a) == wasserstein1(a, b));
    CHECK(wasserstein1(a, bp) == wasserstein1(a, b));
    SummaryVector wrong{{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(wasserstein1(a, wrong), std::invalid_argument);
}

TEST_CASE("sketch_summary flattens all counters") {
    SketchMatrix s(draw_family(2, 6, 3));
    for (std::uint64_t t = 0; t < 90; ++t) s.update(tokenize(std::to_string(t % 11)));
    SummaryVector summary = sketch_summary(s);
    REQUIRE(summary.values.size() == 12);
    double total = 0.0;
    for (double v : summary.values) total += v;
    CHECK(total == doctest::Approx(180.0));
}

TEST_CASE("default_m_prime clamps m/10 into [1, 100000]") {
    CHECK(default_m_prime(500) == 50);
    CHECK(default_m_prime(5) == 1);
    CHECK(default_m_prime(10000000) == 100000);
}

TEST_CASE("config validation") {
    FitConfig cfg;
    cfg.m_prime = 100;
    cfg.validate();
    FitConfig bad = cfg;
    bad.m_prime = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.budget = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.r_replicates = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.box.alpha_hi = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.box.theta_lo = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.box.alpha_lo = 0.8;
    bad.box.alpha_hi = 0.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("synthetic_summary is deterministic and mass-conserving") {
    HashFamily family = draw_family(2, 16, 77);
    PypParams params{0.5, 5.0};
    SummaryVector a = synthetic_summary(params, family, 500, 5000, 9);
    SummaryVector b = synthetic_summary(params, family, 500, 5000, 9);
    CHECK(a.values == b.values);
    SummaryVector c = synthetic_summary(params, family, 500, 5000, 10);
    CHECK(a.values != c.values);
    REQUIRE(a.values.size() == 32);
    double total = 0.0;
    for (double v : a.values) total += v;
    // each of the m' tokens lands once per row, then values scale by m/m'
    CHECK(total == doctest::Approx(2.0 * 5000.0).epsilon(1e-9));
}

TEST_CASE("fit objective is zero on its own synthetic data under CRN") {
    HashFamily family = draw_family(2, 8, 5);
    PypParams params{0.5, 3.0};
    FitConfig cfg;
    cfg.m_prime = 400;
    cfg.r_replicates = 1;
    cfg.seed = 123;
    // replicate 0 regenerates exactly this vector when m' = m
    SummaryVector observed =
        synthetic_summary(params, family, 400, 400, derive_seed(cfg.seed, 0));
    CHECK(fit_objective(params, observed, cfg, family) == doctest::Approx(0.0));
    // a wrong candidate scores strictly worse
    CHECK(fit_objective(PypParams{0.05, 300.0}, observed, cfg, family) > 0.0);
}

TEST_CASE("objective separates truth from gross misfits") {
    StreamSample s = sample_stream(6000, PypParams{0.6, 10.0}, 31);
    HashFamily family = draw_family(2, 32, 8);
    SketchMatrix sketch(family);
    for (std::uint64_t t : s.tokens) sketch.update(t);
    SummaryVector observed = sketch_summary(sketch);
    FitConfig cfg;
    cfg.m_prime = 600;
    cfg.r_replicates = 6;
    cfg.seed = 2;
    double at_truth = fit_objective(PypParams{0.6, 10.0}, observed, cfg, family);
    CHECK(at_truth < fit_objective(PypParams{0.05, 500.0}, observed, cfg, family));
    CHECK(at_truth < fit_objective(PypParams{0.9, 0.05}, observed, cfg, family));
}

TEST_CASE("fit_params is deterministic, budgeted, and returns its best trace point") {
    StreamSample s = sample_stream(4000, PypParams{0.5, 8.0}, 77);
    HashFamily family = draw_family(2, 24, 6);
    SketchMatrix sketch(family);
    for (std::uint64_t t : s.tokens) sketch.update(t);
    SummaryVector observed = sketch_summary(sketch);
    FitConfig cfg;
    cfg.m_prime = 400;
    cfg.r_replicates = 4;
    cfg.budget = 18;
    cfg.seed = 5;
    FitResult r1 = fit_params(observed, cfg, family);
    FitResult r2 = fit_params(observed, cfg, family);
    CHECK(r1.params.alpha == r2.params.alpha);
    CHECK(r1.params.theta == r2.params.theta);
    CHECK(r1.objective == r2.objective);
    CHECK(r1.trace == r2.trace);
    CHECK(r1.evaluations <= cfg.budget);
    CHECK(r1.trace.size() == r1.evaluations);
    CHECK(r1.objective ==
          doctest::Approx(*std::min_element(r1.trace.begin(), r1.trace.end())));
    CHECK(r1.seed == cfg.seed);
    // the search stays inside the box
    CHECK(r1.params.alpha >= cfg.box.alpha_lo);
    CHECK(r1.params.alpha <= cfg.box.alpha_hi);
    CHECK(r1.params.theta >= cfg.box.theta_lo);
    CHECK(r1.params.theta <= cfg.box.theta_hi);
}

TEST_CASE("recovery is roughly right at desk scale") {
    StreamSample s = sample_stream(8000, PypParams{0.6, 10.0}, 5);
    HashFamily family = draw_family(2, 64, 13);
    SketchMatrix sketch(family);
    for (std::uint64_t t : s.tokens) sketch.update(t);
    FitConfig cfg;
    cfg.m_prime = 800;
    cfg.r_replicates = 8;
    cfg.budget = 30;
    cfg.seed = 17;
    FitResult r = fit_params(sketch_summary(sketch), cfg, family);
    CHECK(std::abs(r.params.alpha - 0.6) < 0.3);
}

TEST_CASE("format_fit_record emits five parseable fields") {
    FitResult r;
    r.params = {0.5, 12.25};
    r.objective = 3.5;
    r.evaluations = 42;
    r.seed = 9;
    std::istringstream in(format_fit_record(r));
    double alpha = -1, theta = -1, objective = -1;
    std::uint32_t evals = 0;
    std::uint64_t seed = 0;
    std::string extra;
    in >> alpha >> theta >> objective >> evals >> seed;
    REQUIRE(static_cast<bool>(in));
    bool has_sixth = static_cast<bool>(in >> extra);
    CHECK_FALSE(has_sixth);
    CHECK(alpha == doctest::Approx(0.5));
    CHECK(theta == doctest::Approx(12.25));
    CHECK(objective == doctest::Approx(3.5));
    CHECK(evals == 42);
    CHECK(seed == 9);
}
