#include "bnpcms/posterior_dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/log_value.hpp"

namespace bnpcms {

std::vector<double> dp_posterior_log_pmf(double theta, std::uint32_t j, std::uint64_t c) {
    if (!(theta > 0.0)) throw std::invalid_argument("dp_posterior_log_pmf: needs theta > 0");
    if (j == 0) throw std::invalid_argument("dp_posterior_log_pmf: needs j >= 1");
    const double a = theta / static_cast<double>(j);
    const double cd = static_cast<double>(c);
    const double head = std::log(a) - std::log(a + cd) + std::lgamma(cd + 1.0) -
                        std::lgamma(a + cd);
    std::vector<double> logp(c + 1);
    for (std::uint64_t l = 0; l <= c; ++l) {
        const double ld = static_cast<double>(l);
        logp[l] = head - std::lgamma(cd - ld + 1.0) + std::lgamma(a + cd - ld);
    }
    return logp;
}

PosteriorPmf dp_posterior_single(double theta, std::uint32_t j, std::uint64_t c) {
    return normalize_pmf(dp_posterior_log_pmf(theta, j, c));
}

PosteriorPmf dp_posterior_multi(double theta, std::uint32_t j, const HashedRow& row,
                                MultiHashForm form, std::uint64_t m) {
    if (row.values.empty()) throw std::invalid_argument("dp_posterior_multi: empty row");
    const std::uint64_t support =
        *std::min_element(row.values.begin(), row.values.end());
    std::vector<double> log_weights(support + 1, 0.0);
    for (std::uint64_t c : row.values) {
        const auto logp = dp_posterior_log_pmf(theta, j, c);
        for (std::uint64_t l = 0; l <= support; ++l) log_weights[l] += logp[l];
    }
    if (form == MultiHashForm::kPriorCorrected && row.values.size() > 1) {
        const std::uint64_t c_max =
            *std::max_element(row.values.begin(), row.values.end());
        if (m < c_max)
            throw std::invalid_argument("dp_posterior_multi: prior correction needs m");
        const auto log_prior = latent_frequency_log_prior(m, PypParams{0.0, theta});
        const double power = static_cast<double>(row.values.size()) - 1.0;
        for (std::uint64_t l = 0; l <= support; ++l) log_weights[l] -= power * log_prior[l];
    }
    return normalize_pmf(std::move(log_weights));
}

double fit_theta_empirical_bayes(const SketchMatrix& sketch, double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("fit_theta_empirical_bayes: bad bracket");
    auto objective = [&](double log_theta) {
        const double value = dm_log_likelihood(sketch, std::exp(log_theta));
        if (!std::isfinite(value))
            throw std::runtime_error("fit_theta_empirical_bayes: non-finite likelihood");
        return value;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(lo);
    double b = std::log(hi);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return std::exp((a + b) / 2.0);
}

}  // namespace bnpcms
