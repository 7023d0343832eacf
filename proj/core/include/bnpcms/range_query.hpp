#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bnpcms/posterior.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

/// Thrown when the conditioning counts have zero probability under the
/// model, e.g. two tokens in distinct buckets whose counts together exceed
/// the stream length.
struct ZeroProbabilityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Joint posterior of two tokens' latent frequencies. log_probs is
/// row-major over (l1, l2) in [0..support1] x [0..support2]; mass outside
/// the rectangle is zero.
struct JointPosterior2 {
    std::uint64_t support1 = 0;
    std::uint64_t support2 = 0;
    std::vector<double> log_probs;

    double log_prob(std::uint64_t l1, std::uint64_t l2) const {
        return log_probs[l1 * (support2 + 1) + l2];
    }
    double prob(std::uint64_t l1, std::uint64_t l2) const;
};

/// Joint posterior of (f1, f2) given one hash function's counts (c1, c2)
/// under a Dirichlet-process stream model: two closed-form Den terms and
/// three Num terms, the shared-bucket ones gated by c1 == c2 and the
/// equal-token one further by l1 == l2; terms with a negative factorial
/// argument contribute zero. Log-Gamma evaluation throughout, so stream
/// sizes ~1e6 stay in range. Requires theta > 0, j >= 2, c1 <= m, c2 <= m;
/// throws ZeroProbabilityError when c1 != c2 and c1 + c2 > m.
JointPosterior2 dp_range2_single(double theta, std::uint32_t j, std::uint64_t m,
                                 std::uint64_t c1, std::uint64_t c2);

/// N-hash product form: p(l1, l2) proportional to the product over rows of
/// the single-hash joint at (c_{n,1}, c_{n,2}), normalized over
/// [0..min_n c_{n,1}] x [0..min_n c_{n,2}]. Rows must be nonempty and of
/// equal depth.
JointPosterior2 dp_range2_multi(double theta, std::uint32_t j, std::uint64_t m,
                                const HashedRow& row1, const HashedRow& row2);

/// Distribution of the total f1 + f2 under the joint: p(t) = sum of
/// p(l1, l2) over l1 + l2 = t.
PosteriorPmf range_sum_posterior(const JointPosterior2& joint);

}  // namespace bnpcms
