#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bnpcms/pyp_params.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

enum class Estimator {
    kCms,
    kCmm,
    kDpMean,
    kDpMedian,
    kDpMode,
    kPypMean,
    kPypMedian,
    kPypMode,
    kTruth,
};

/// Names: cms, cmm, dp-mean, dp-median, dp-mode, pyp-mean, pyp-median,
/// pyp-mode, truth. parse_estimator throws std::invalid_argument on
/// anything else.
Estimator parse_estimator(std::string_view name);
std::string_view estimator_name(Estimator estimator);

bool estimator_needs_dp(Estimator estimator);
bool estimator_needs_pyp(Estimator estimator);

/// Half-open-from-below frequency interval (lo, hi].
struct FrequencyBin {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

/// The nine report rows: (0,1], (1,2], (2,4], (4,8], (8,16], (16,32],
/// (32,64], (64,128], (128,256]. Tokens with true frequency above 256 fall
/// outside every bin and are not reported.
std::span<const FrequencyBin> bench_bins();

/// Exact frequency of every distinct token id.
std::unordered_map<std::uint64_t, std::uint64_t> exact_counts(
    std::span<const std::uint64_t> tokens);

struct BinnedMaeReport {
    std::vector<std::string> estimators;
    std::vector<std::uint64_t> bin_tokens;   // queried tokens per bin
    std::vector<std::vector<double>> mae;    // [bin][estimator]; 0 for empty bins

    std::string text_table() const;
    std::string csv() const;
};

struct BenchOptions {
    double dp_theta = 0.0;   // required when any dp-* estimator is requested
    PypParams pyp;           // required when any pyp-* estimator is requested
    bool has_dp = false;
    bool has_pyp = false;

    /// When positive and the vocabulary is larger, only this many distinct
    /// tokens are queried, drawn uniformly without replacement,
    /// deterministically in `seed`. Zero queries everything.
    std::uint64_t sample_cap = 0;
    std::uint64_t seed = 1;

    /// Worker threads for posterior-kernel precomputation over the sorted
    /// distinct counter values (fixed 32-chunk partition, so results do not
    /// depend on the thread count). Queries themselves run serially.
    std::uint32_t threads = 0;  // 0 = hardware concurrency
};

/// Queries the sketch for every (sampled) distinct token, compares each
/// estimator against the exact count, and aggregates mean absolute error
/// per frequency bin.
BinnedMaeReport binned_mae(const SketchMatrix& sketch,
                           const std::unordered_map<std::uint64_t, std::uint64_t>& truth,
                           std::span<const Estimator> estimators,
                           const BenchOptions& options);

}  // namespace bnpcms
