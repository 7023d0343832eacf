#include "bnpcms/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace bnpcms {

LogValue log_rising(double a, std::uint64_t n) {
    if (!(a >= 0.0)) throw std::invalid_argument("log_rising: base must be nonnegative");
    if (n == 0) return LogValue::one();
    if (a == 0.0) return LogValue::zero();
    const double la = std::lgamma(a + static_cast<double>(n)) - std::lgamma(a);
    return LogValue::from_log(la);
}

GfcTable::GfcTable(int m_max, double alpha) : m_max_(m_max), alpha_(alpha) {
    if (m_max < 0 || m_max > 20000) throw std::invalid_argument("GfcTable: m_max out of range");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("GfcTable: alpha must lie in (0, 1)");
    rows_.assign(static_cast<std::size_t>(m_max + 1) * (m_max + 2) / 2, kNegInf);
    const double log_alpha = std::log(alpha);
    rows_[0] = 0.0;  // C(0, 0) = 1
    for (int m = 0; m < m_max; ++m) {
        const std::size_t cur = static_cast<std::size_t>(m) * (m + 1) / 2;
        const std::size_t nxt = static_cast<std::size_t>(m + 1) * (m + 2) / 2;
        for (int k = 1; k <= m + 1; ++k) {
            const double keep =
                k <= m ? std::log(m - k * alpha) + rows_[cur + k] : kNegInf;
            const double grow = log_alpha + rows_[cur + k - 1];
            rows_[nxt + k] = log_add(keep, grow);
        }
    }
}

double GfcTable::log_at(int m, int k) const {
    if (m < 0 || m > m_max_ || k < 0 || k > m) return kNegInf;
    return rows_[static_cast<std::size_t>(m) * (m + 1) / 2 + k];
}

double stirling1_signless_log(int m, int k) {
    if (m < 0 || k < 0 || k > m) return kNegInf;
    // |s(m+1, k)| = m |s(m, k)| + |s(m, k-1)| built row by row.
    std::vector<double> row{0.0};
    for (int mm = 0; mm < m; ++mm) {
        std::vector<double> next(mm + 2, kNegInf);
        const double log_mm = mm > 0 ? std::log(static_cast<double>(mm)) : kNegInf;
        for (int kk = 1; kk <= mm + 1; ++kk) {
            const double keep = kk <= mm ? log_mm + row[kk] : kNegInf;
            const double shift = row[kk - 1];
            next[kk] = log_add(keep, shift);
        }
        if (mm == 0) next[0] = kNegInf;
        row = std::move(next);
    }
    return row[k];
}

std::vector<double> km_pmf(std::uint64_t m, const PypParams& params, const GfcTable& gfc) {
    params.validate();
    if (params.alpha == 0.0) throw std::invalid_argument("km_pmf: needs alpha > 0");
    if (gfc.alpha() != params.alpha || gfc.m_max() < static_cast<int>(m))
        throw std::invalid_argument("km_pmf: table does not cover (m, alpha)");
    std::vector<double> probs(m + 1, 0.0);
    if (m == 0) {
        probs[0] = 1.0;
        return probs;
    }
    const double ratio = params.theta / params.alpha;
    const double log_denom = log_rising(params.theta, m).log_abs();
    double log_num_ratio = 0.0;  // log (theta/alpha)_k, updated incrementally
    for (std::uint64_t k = 1; k <= m; ++k) {
        log_num_ratio += std::log(ratio + static_cast<double>(k - 1));
        probs[k] = std::exp(log_num_ratio - log_denom +
                            gfc.log_at(static_cast<int>(m), static_cast<int>(k)));
    }
    return probs;
}

LogValue km_pgf_log(double t, std::uint64_t m, const PypParams& params, const GfcTable& gfc) {
    if (!(t > 0.0)) throw std::invalid_argument("km_pgf_log: t must be positive");
    if (m == 0) return LogValue::one();
    const std::vector<double> probs = km_pmf(m, params, gfc);
    const double log_t = std::log(t);
    std::vector<double> terms;
    terms.reserve(m);
    for (std::uint64_t k = 1; k <= m; ++k) {
        if (probs[k] == 0.0) continue;
        terms.push_back(std::log(probs[k]) + static_cast<double>(k) * log_t);
    }
    return LogValue::from_log(log_sum_exp(terms));
}

}  // namespace bnpcms
