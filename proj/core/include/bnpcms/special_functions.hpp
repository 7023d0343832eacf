#pragma once

#include <cstdint>
#include <vector>

#include "bnpcms/log_value.hpp"
#include "bnpcms/pyp_params.hpp"

namespace bnpcms {

/// log of the rising factorial (a)_n = a (a+1) ... (a+n-1), a >= 0.
/// n == 0 gives exactly 0; a == 0 with n >= 1 gives zero. Callers needing
/// negative bases must factor the offending leading terms out themselves.
LogValue log_rising(double a, std::uint64_t n);

/// log of the binomial coefficient C(n, k); -inf when k > n.
inline double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return kNegInf;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// Triangular table of generalized factorial coefficients C(m, k; alpha) for
/// 0 < alpha < 1, built by the recurrence
///   C(m+1, k) = (m - k*alpha) C(m, k) + alpha C(m, k-1),  C(0, 0) = 1.
/// Entries are strictly positive for 1 <= k <= m and stored as logs.
class GfcTable {
  public:
    GfcTable(int m_max, double alpha);

    /// log C(m, k; alpha); -inf outside the support {k == m == 0} U
    /// {1 <= k <= m}.
    double log_at(int m, int k) const;

    int m_max() const { return m_max_; }
    double alpha() const { return alpha_; }

  private:
    int m_max_;
    double alpha_;
    std::vector<double> rows_;  // row m starts at m*(m+1)/2, entries k=0..m
};

/// log of the signless Stirling number of the first kind |s(m, k)|.
double stirling1_signless_log(int m, int k);

/// Law of the number of distinct symbols K_m in a Pitman-Yor sample of size
/// m: Pr[K_m = k] = (theta/alpha)_k / (theta)_m * C(m, k; alpha).
/// Returned vector is indexed by k (entry 0 is zero for m >= 1). Requires
/// alpha > 0 and gfc.alpha() == params.alpha with gfc.m_max() >= m.
std::vector<double> km_pmf(std::uint64_t m, const PypParams& params, const GfcTable& gfc);

/// log G_{K_m}(t) = log sum_k Pr[K_m = k] t^k for t > 0; m == 0 gives log 1.
LogValue km_pgf_log(double t, std::uint64_t m, const PypParams& params, const GfcTable& gfc);

}  // namespace bnpcms
