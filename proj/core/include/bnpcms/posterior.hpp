#pragma once

#include <cstdint>
#include <vector>

namespace bnpcms {

/// Normalized pmf over the latent frequency l = 0..support_max, log scale.
struct PosteriorPmf {
    std::vector<double> log_probs;

    std::uint64_t support_max() const { return log_probs.size() - 1; }
    double prob(std::uint64_t l) const;
};

enum class SummaryKind { kMean, kMedian, kMode };

/// mean = sum l p(l); median = smallest l with cdf >= 1/2; mode = argmax
/// with smallest-l tie-break.
double posterior_summary(const PosteriorPmf& pmf, SummaryKind kind);

/// Normalizes raw log weights into a PosteriorPmf. If raw_drift is non-null
/// it receives |sum exp(raw) - 1|, a diagnostic for families whose raw
/// values are analytically normalized already.
PosteriorPmf normalize_pmf(std::vector<double> log_weights, double* raw_drift = nullptr);

}  // namespace bnpcms
