#pragma once

#include <cstdint>
#include <vector>

#include "bnpcms/pyp_params.hpp"

namespace bnpcms {

/// Exact joint law of the latent frequencies of the next `arity` draws and
/// their hashed counts, computed by exhaustive enumeration of set partitions.
/// Serves as the independent ground truth for the analytic posteriors.
///
/// Indexing:
///   latent index   = l                 (arity 1)
///                  = l1 * (m+1) + l2   (arity 2)
///   per-row counts = c                 (arity 1)
///                  = c1 * (m+1) + c2   (arity 2)
///   counts index   = row-1 counts                                   (rows 1)
///                  = row-1 counts * counts_per_row + row-2 counts   (rows 2)
struct OracleTable {
    std::uint64_t m = 0;
    std::uint32_t j = 1;
    int arity = 1;
    int rows = 1;
    std::size_t n_latent = 0;
    std::size_t counts_per_row = 0;
    std::size_t n_counts = 0;
    std::vector<double> probs;  // [latent * n_counts + counts]

    double at(std::size_t latent, std::size_t counts) const {
        return probs[latent * n_counts + counts];
    }

    /// Pr[counts], marginalized over the latent index.
    double counts_marginal(std::size_t counts) const;

    /// Pr[latent | counts], normalized; throws if Pr[counts] = 0.
    std::vector<double> conditional(std::size_t counts) const;
};

/// Enumerates all set partitions of {1, ..., m + arity}, weights each by the
/// Pitman-Yor exchangeable-partition probability
///   prod_{i=0}^{k-1}(theta + i alpha) / (theta)_{m+arity}
///     * prod_blocks (1 - alpha)_{size - 1},
/// assigns every block an independent uniform bucket per row, and
/// marginalizes to the joint law of (latent frequencies, hashed counts).
/// Limits: m <= 10, j <= 4, arity and rows in {1, 2} (Bell-number blowup).
OracleTable enumeration_oracle(std::uint64_t m, std::uint32_t j, const PypParams& params,
                               int arity = 1, int rows = 1);

}  // namespace bnpcms
