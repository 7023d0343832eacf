#include "bnpcms/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/rng.hpp"

namespace bnpcms {

SummaryVector sketch_summary(const SketchMatrix& sketch) {
    SummaryVector summary;
    summary.values.reserve(static_cast<std::size_t>(sketch.depth()) * sketch.width());
    for (std::uint32_t n = 0; n < sketch.depth(); ++n)
        for (std::uint32_t b = 0; b < sketch.width(); ++b)
            summary.values.push_back(static_cast<double>(sketch.at(n, b)));
    return summary;
}

void FitConfig::validate() const {
    if (m_prime == 0) throw std::invalid_argument("FitConfig: needs m_prime >= 1");
    if (r_replicates == 0) throw std::invalid_argument("FitConfig: needs r_replicates >= 1");
    if (budget == 0) throw std::invalid_argument("FitConfig: needs budget >= 1");
    if (!(box.alpha_lo >= 0.0 && box.alpha_lo <= box.alpha_hi && box.alpha_hi < 1.0))
        throw std::invalid_argument("FitConfig: alpha box must sit inside [0, 1)");
    if (!(box.theta_lo > 0.0 && box.theta_lo <= box.theta_hi))
        throw std::invalid_argument("FitConfig: theta box must sit inside (0, inf)");
}

std::uint64_t default_m_prime(std::uint64_t m) {
    return std::clamp<std::uint64_t>(m / 10, 1, 100000);
}

double wasserstein1(const SummaryVector& x, const SummaryVector& y) {
    if (x.values.size() != y.values.size())
        throw std::invalid_argument("wasserstein1: summary lengths differ");
    if (x.values.empty()) return 0.0;
    std::vector<double> a = x.values;
    std::vector<double> b = y.values;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / static_cast<double>(a.size());
}

SummaryVector synthetic_summary(const PypParams& params, const HashFamily& family,
                                std::uint64_t m_prime, std::uint64_t m,
                                std::uint64_t seed) {
    if (m_prime == 0) throw std::invalid_argument("synthetic_summary: needs m_prime >= 1");
    const StreamSample sample = sample_stream(m_prime, params, seed);

    // Symbol ids are dense 0..K-1; hash each distinct symbol once.
    std::vector<std::uint64_t> multiplicity(sample.stats.distinct, 0);
    for (std::uint64_t id : sample.tokens) ++multiplicity[id];

    const std::uint32_t depth = family.depth();
    const std::uint32_t width = family.j;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(depth) * width, 0);
    for (std::uint64_t id = 0; id < multiplicity.size(); ++id) {
        const std::uint64_t key = derive_seed(seed, id);
        for (std::uint32_t n = 0; n < depth; ++n)
            counts[static_cast<std::size_t>(n) * width + hash_token(family.specs[n], key)] +=
                multiplicity[id];
    }

    const double scale = static_cast<double>(m) / static_cast<double>(m_prime);
    SummaryVector summary;
    summary.values.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        summary.values[i] = scale * static_cast<double>(counts[i]);
    return summary;
}

double fit_objective(const PypParams& params, const SummaryVector& observed,
                     const FitConfig& cfg, const HashFamily& family) {
    cfg.validate();
    params.validate();
    const std::size_t cells =
        static_cast<std::size_t>(family.depth()) * family.j;
    if (observed.values.size() != cells)
        throw std::invalid_argument("fit_objective: summary length does not match the family");
    const double total =
        std::accumulate(observed.values.begin(), observed.values.end(), 0.0);
    const auto m = static_cast<std::uint64_t>(
        std::llround(total / static_cast<double>(family.depth())));

    double acc = 0.0;
    for (std::uint32_t r = 0; r < cfg.r_replicates; ++r) {
        const SummaryVector synthetic =
            synthetic_summary(params, family, cfg.m_prime, m, derive_seed(cfg.seed, r));
        acc += wasserstein1(observed, synthetic);
    }
    return acc / static_cast<double>(cfg.r_replicates);
}

namespace {

struct Point {
    double alpha = 0.0;
    double log_theta = 0.0;
    double value = 0.0;
};

}  // namespace

FitResult fit_params(const SummaryVector& observed, const FitConfig& cfg,
                     const HashFamily& family) {
    cfg.validate();
    const double log_theta_lo = std::log(cfg.box.theta_lo);
    const double log_theta_hi = std::log(cfg.box.theta_hi);

    FitResult result;
    result.seed = cfg.seed;
    result.objective = std::numeric_limits<double>::infinity();

    auto evaluate = [&](double alpha, double log_theta) {
        alpha = std::clamp(alpha, cfg.box.alpha_lo, cfg.box.alpha_hi);
        log_theta = std::clamp(log_theta, log_theta_lo, log_theta_hi);
        PypParams params;
        params.alpha = alpha;
        params.theta = std::exp(log_theta);
        const double value = fit_objective(params, observed, cfg, family);
        ++result.evaluations;
        result.trace.push_back(value);
        if (value < result.objective) {
            result.objective = value;
            result.params = params;
        }
        return value;
    };

    // Stage 1: Latin hypercube over the box, half the budget.
    const std::uint32_t n_probe = std::max<std::uint32_t>(1, cfg.budget / 2);
    std::mt19937_64 rng(derive_seed(cfg.seed, 0x4c485350));
    std::vector<std::uint32_t> strata_a(n_probe), strata_t(n_probe);
    std::iota(strata_a.begin(), strata_a.end(), 0);
    std::iota(strata_t.begin(), strata_t.end(), 0);
    std::shuffle(strata_a.begin(), strata_a.end(), rng);
    std::shuffle(strata_t.begin(), strata_t.end(), rng);
    Point best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < n_probe && result.evaluations < cfg.budget; ++i) {
        const double ua = (static_cast<double>(strata_a[i]) + uniform_unit(rng)) /
                          static_cast<double>(n_probe);
        const double ut = (static_cast<double>(strata_t[i]) + uniform_unit(rng)) /
                          static_cast<double>(n_probe);
        Point p;
        p.alpha = cfg.box.alpha_lo + ua * (cfg.box.alpha_hi - cfg.box.alpha_lo);
        p.log_theta = log_theta_lo + ut * (log_theta_hi - log_theta_lo);
        p.value = evaluate(p.alpha, p.log_theta);
        if (p.value < best.value) best = p;
    }

    // Stage 2: Nelder-Mead from the best probe, box-clamped, spending the
    // rest of the budget.
    const double step_a = 0.1 * (cfg.box.alpha_hi - cfg.box.alpha_lo);
    const double step_t = 0.08 * (log_theta_hi - log_theta_lo);
    std::array<Point, 3> simplex;
    simplex[0] = best;
    simplex[1] = best;
    simplex[1].alpha += (best.alpha + step_a > cfg.box.alpha_hi) ? -step_a : step_a;
    simplex[2] = best;
    simplex[2].log_theta += (best.log_theta + step_t > log_theta_hi) ? -step_t : step_t;
    bool budget_left = result.evaluations < cfg.budget;
    for (std::size_t i = 1; i < simplex.size() && budget_left; ++i) {
        simplex[i].value = evaluate(simplex[i].alpha, simplex[i].log_theta);
        budget_left = result.evaluations < cfg.budget;
    }

    if (budget_left && step_a > 0.0 && step_t > 0.0) {
        auto order = [&] {
            std::sort(simplex.begin(), simplex.end(),
                      [](const Point& x, const Point& y) { return x.value < y.value; });
        };
        order();
        while (result.evaluations < cfg.budget) {
            const Point centroid{0.5 * (simplex[0].alpha + simplex[1].alpha),
                                 0.5 * (simplex[0].log_theta + simplex[1].log_theta), 0.0};
            auto along = [&](double t) {
                Point p;
                p.alpha = centroid.alpha + t * (centroid.alpha - simplex[2].alpha);
                p.log_theta =
                    centroid.log_theta + t * (centroid.log_theta - simplex[2].log_theta);
                p.value = evaluate(p.alpha, p.log_theta);
                return p;
            };
            const Point reflected = along(1.0);
            if (reflected.value < simplex[0].value) {
                if (result.evaluations >= cfg.budget) break;
                const Point expanded = along(2.0);
                simplex[2] = expanded.value < reflected.value ? expanded : reflected;
            } else if (reflected.value < simplex[1].value) {
                simplex[2] = reflected;
            } else {
                if (result.evaluations >= cfg.budget) break;
                const Point contracted = along(reflected.value < simplex[2].value ? 0.5 : -0.5);
                if (contracted.value < std::min(reflected.value, simplex[2].value)) {
                    simplex[2] = contracted;
                } else {
                    // Shrink toward the best vertex.
                    for (std::size_t i = 1; i < simplex.size(); ++i) {
                        if (result.evaluations >= cfg.budget) break;
                        simplex[i].alpha = 0.5 * (simplex[i].alpha + simplex[0].alpha);
                        simplex[i].log_theta =
                            0.5 * (simplex[i].log_theta + simplex[0].log_theta);
                        simplex[i].value = evaluate(simplex[i].alpha, simplex[i].log_theta);
                    }
                }
            }
            order();
        }
    }

    if (!std::isfinite(result.objective))
        throw std::runtime_error("fit_params: no finite objective evaluation within budget");
    return result;
}

std::string format_fit_record(const FitResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << result.params.alpha << ' ' << result.params.theta << ' ' << result.objective
        << ' ' << result.evaluations << ' ' << result.seed;
    return out.str();
}

}  // namespace bnpcms
