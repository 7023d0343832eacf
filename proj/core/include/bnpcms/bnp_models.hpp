#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bnpcms/pyp_params.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

/// Block-structure summary of a token stream: number of distinct symbols,
/// and for each multiplicity r the number of symbols occurring exactly r
/// times. Invariants: sum of counts = distinct, sum of r * count = sample
/// size.
struct PartitionStats {
    std::uint64_t distinct = 0;
    std::map<std::uint64_t, std::uint64_t> multiplicity_counts;
    std::uint64_t sample_size = 0;
};

PartitionStats partition_stats(std::span<const std::uint64_t> tokens);

struct StreamSample {
    std::vector<std::uint64_t> tokens;
    PartitionStats stats;
};

/// Draws m tokens from the Pitman-Yor (or, at alpha = 0, Dirichlet-process)
/// predictive rule: a new symbol with probability (theta + k alpha) /
/// (theta + i), an existing symbol of multiplicity r with probability
/// proportional to r - alpha. Symbols are fresh ids 0, 1, 2, ... in order of
/// first appearance; the sequence is a deterministic function of
/// (m, params, seed). Runs in O(m log m).
StreamSample sample_stream(std::uint64_t m, const PypParams& params, std::uint64_t seed);

/// pmf over l = 0..m of the latent frequency of the next draw among the
/// first m under a Dirichlet process:
///   p(l) = theta/(theta+m) * (m-l+1)_l / (theta+m-l)_l.
std::vector<double> dp_marginal_pmf(std::uint64_t m, double theta);

/// Log prior pmf over the latent frequency l = 0..m of a queried symbol in
/// an exchangeable stream of length m:
///   Pr[f = l] = theta C(m, l) (theta+alpha)_{m-l} (1-alpha)_l / (theta)_{m+1}.
/// Requires theta > 0. alpha = 0 reduces to dp_marginal_pmf.
std::vector<double> latent_frequency_log_prior(std::uint64_t m, const PypParams& params);

/// Log likelihood of the sketch's counter rows under the model in which each
/// row is an independent Dirichlet-multinomial draw: row c has probability
///   m! / (theta)_m * prod_j (theta/J)_{c_j} / c_j!.
/// Exact for one row; rows share the stream, so for depth > 1 this is a
/// composite likelihood.
double dm_log_likelihood(const SketchMatrix& sketch, double theta);

}  // namespace bnpcms
