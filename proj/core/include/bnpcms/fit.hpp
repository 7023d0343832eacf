#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnpcms/hashing.hpp"
#include "bnpcms/pyp_params.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

/// Unordered flattening of a sketch's N x J counters: the summary statistic
/// the likelihood-free fit matches. Entries are real-valued because
/// synthetic summaries are rescaled by m / m'.
struct SummaryVector {
    std::vector<double> values;
};

SummaryVector sketch_summary(const SketchMatrix& sketch);

/// Search box for (alpha, theta); theta is searched on log scale.
struct FitBox {
    double alpha_lo = 0.0;
    double alpha_hi = 0.95;
    double theta_lo = 1e-2;
    double theta_hi = 1e3;
};

struct FitConfig {
    std::uint64_t m_prime = 0;     // synthetic sample size per replicate
    std::uint32_t r_replicates = 25;
    std::uint64_t seed = 1;
    std::uint32_t budget = 50;     // total objective evaluations
    FitBox box;

    void validate() const;
};

/// Default synthetic sample size: m / 10, clamped to [1, 100000]. The
/// sampler's cost grows superlinearly in m', so the cap binds for large
/// streams.
std::uint64_t default_m_prime(std::uint64_t m);

/// Order-1 Wasserstein distance between the empirical measures of two
/// equal-length vectors: mean elementwise gap after sorting both.
double wasserstein1(const SummaryVector& x, const SummaryVector& y);

/// Sketch summary of a synthetic stream: m' tokens drawn from the model,
/// pushed through the real hash family, flattened, and scaled by m / m'.
/// Symbol ids are scrambled through the seed before hashing so distinct
/// replicates exercise distinct bucket assignments while the family itself
/// stays fixed. Deterministic in (params, family, m_prime, m, seed).
SummaryVector synthetic_summary(const PypParams& params, const HashFamily& family,
                                std::uint64_t m_prime, std::uint64_t m,
                                std::uint64_t seed);

/// Monte Carlo objective: mean over R replicates of W1(observed, synthetic).
/// Replicate seeds derive from cfg.seed alone, so every (alpha, theta) sees
/// the same random numbers and the surface is smooth in the parameters.
/// The stream length is recovered from the observed summary's row sums
/// (each token increments one counter per row), so the observed vector must
/// hold raw counts, not a rescaled summary.
double fit_objective(const PypParams& params, const SummaryVector& observed,
                     const FitConfig& cfg, const HashFamily& family);

struct FitResult {
    PypParams params;
    double objective = 0.0;
    std::uint32_t evaluations = 0;
    std::uint64_t seed = 0;
    std::vector<double> trace;  // objective value per evaluation, in order
};

/// Two-stage deterministic search under common random numbers: a Latin
/// hypercube probe spending half the budget, then Nelder-Mead on
/// (alpha, log theta) from the best probe, clamped to the box. Throws
/// std::runtime_error if no evaluation in the budget is finite.
FitResult fit_params(const SummaryVector& observed, const FitConfig& cfg,
                     const HashFamily& family);

/// One-line record: "alpha theta objective evaluations seed".
std::string format_fit_record(const FitResult& result);

}  // namespace bnpcms
