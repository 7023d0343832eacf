#include "bnpcms/posterior.hpp"

#include <cmath>
#include <stdexcept>

#include "bnpcms/log_value.hpp"

namespace bnpcms {

double PosteriorPmf::prob(std::uint64_t l) const {
    if (l >= log_probs.size()) return 0.0;
    return std::exp(log_probs[l]);
}

double posterior_summary(const PosteriorPmf& pmf, SummaryKind kind) {
    if (pmf.log_probs.empty()) throw std::invalid_argument("posterior_summary: empty pmf");
    switch (kind) {
        case SummaryKind::kMean: {
            double mean = 0.0;
            for (std::size_t l = 1; l < pmf.log_probs.size(); ++l)
                mean += static_cast<double>(l) * std::exp(pmf.log_probs[l]);
            return mean;
        }
        case SummaryKind::kMedian: {
            double cdf = 0.0;
            for (std::size_t l = 0; l < pmf.log_probs.size(); ++l) {
                cdf += std::exp(pmf.log_probs[l]);
                if (cdf >= 0.5) return static_cast<double>(l);
            }
            return static_cast<double>(pmf.log_probs.size() - 1);
        }
        case SummaryKind::kMode: {
            std::size_t best = 0;
            for (std::size_t l = 1; l < pmf.log_probs.size(); ++l)
                if (pmf.log_probs[l] > pmf.log_probs[best]) best = l;
            return static_cast<double>(best);
        }
    }
    throw std::invalid_argument("posterior_summary: unknown summary kind");
}

PosteriorPmf normalize_pmf(std::vector<double> log_weights, double* raw_drift) {
    if (log_weights.empty()) throw std::invalid_argument("normalize_pmf: empty support");
    const double norm = log_sum_exp(log_weights);
    if (norm == kNegInf || !std::isfinite(norm))
        throw std::domain_error("normalize_pmf: weights do not normalize");
    if (raw_drift) *raw_drift = std::fabs(std::expm1(norm));
    for (double& lw : log_weights) lw -= norm;
    return PosteriorPmf{std::move(log_weights)};
}

}  // namespace bnpcms
