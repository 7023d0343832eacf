#include "bnpcms/range_query.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnpcms/log_value.hpp"
#include "bnpcms/special_functions.hpp"

namespace bnpcms {

double JointPosterior2::prob(std::uint64_t l1, std::uint64_t l2) const {
    if (l1 > support1 || l2 > support2) return 0.0;
    return std::exp(log_prob(l1, l2));
}

namespace {

double log_factorial(std::uint64_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// log (a)_(n) for a >= 0; -inf encodes the vanishing a = 0, n >= 1 case
// (exactly the theta - 2 theta / J factor at J = 2).
double lr(double a, std::uint64_t n) { return log_rising(a, n).log_abs(); }

struct Range2Terms {
    double theta, log_theta, log_j, m;
    std::uint32_t j;
    std::uint64_t stream;
    double theta_over_j, theta_rest1, theta_rest2;

    Range2Terms(double theta_, std::uint32_t j_, std::uint64_t m_)
        : theta(theta_),
          log_theta(std::log(theta_)),
          log_j(std::log(static_cast<double>(j_))),
          m(static_cast<double>(m_)),
          j(j_),
          stream(m_),
          theta_over_j(theta_ / static_cast<double>(j_)),
          theta_rest1(theta_ - theta_ / static_cast<double>(j_)),
          theta_rest2(theta_ - 2.0 * theta_ / static_cast<double>(j_)) {}

    double log_den(std::uint64_t c1, std::uint64_t c2) const {
        double den = kNegInf;
        if (c1 == c2) {
            const std::uint64_t c = c1;
            den = log_add(den, log_j + lr(theta_over_j, c + 2) +
                                   lr(theta_rest1, stream - c) - log_factorial(c) -
                                   log_factorial(stream - c));
        }
        if (c1 + c2 <= stream) {
            den = log_add(den, log_j + std::log(static_cast<double>(j - 1)) +
                                   lr(theta_over_j, c1 + 1) + lr(theta_over_j, c2 + 1) +
                                   lr(theta_rest2, stream - c1 - c2) -
                                   log_factorial(c1) - log_factorial(c2) -
                                   log_factorial(stream - c1 - c2));
        }
        return den;
    }

    double log_num(std::uint64_t l1, std::uint64_t l2, std::uint64_t c1,
                   std::uint64_t c2) const {
        double num = kNegInf;
        if (c1 == c2) {
            const std::uint64_t c = c1;
            const double tail = lr(theta_rest1, stream - c) - log_factorial(stream - c);
            if (l1 == l2 && l1 <= c) {
                num = log_add(num, log_theta + std::log(static_cast<double>(l1) + 1.0) +
                                       lr(theta_over_j, c - l1) - log_factorial(c - l1) +
                                       tail);
            }
            if (l1 + l2 <= c) {
                num = log_add(num, 2.0 * log_theta - log_j +
                                       lr(theta_over_j, c - l1 - l2) -
                                       log_factorial(c - l1 - l2) + tail);
            }
        }
        if (l1 <= c1 && l2 <= c2 && c1 + c2 <= stream) {
            num = log_add(num, std::log(static_cast<double>(j - 1)) - log_j +
                                   2.0 * log_theta + lr(theta_over_j, c1 - l1) +
                                   lr(theta_over_j, c2 - l2) +
                                   lr(theta_rest2, stream - c1 - c2) -
                                   log_factorial(c1 - l1) - log_factorial(c2 - l2) -
                                   log_factorial(stream - c1 - c2));
        }
        return num;
    }
};

void validate_range2(double theta, std::uint32_t j, std::uint64_t m, std::uint64_t c1,
                     std::uint64_t c2) {
    if (!(theta > 0.0)) throw std::invalid_argument("dp_range2: needs theta > 0");
    if (j < 2) throw std::invalid_argument("dp_range2: needs j >= 2");
    if (c1 > m || c2 > m)
        throw std::invalid_argument("dp_range2: count exceeds stream size");
    if (c1 != c2 && c1 + c2 > m)
        throw ZeroProbabilityError(
            "dp_range2: counts " + std::to_string(c1) + ", " + std::to_string(c2) +
            " in distinct buckets cannot fit a stream of size " + std::to_string(m));
}

// log Num over the clipped rectangle [0..s1] x [0..s2], without the Den
// normalizer; the multi form products these across rows before normalizing.
std::vector<double> range2_kernel(const Range2Terms& t, std::uint64_t c1,
                                  std::uint64_t c2, std::uint64_t s1,
                                  std::uint64_t s2) {
    std::vector<double> out((s1 + 1) * (s2 + 1));
    for (std::uint64_t l1 = 0; l1 <= s1; ++l1)
        for (std::uint64_t l2 = 0; l2 <= s2; ++l2)
            out[l1 * (s2 + 1) + l2] = t.log_num(l1, l2, c1, c2);
    return out;
}

JointPosterior2 finalize(std::uint64_t s1, std::uint64_t s2,
                         std::vector<double> log_probs) {
    JointPosterior2 joint;
    joint.support1 = s1;
    joint.support2 = s2;
    joint.log_probs = std::move(log_probs);
    return joint;
}

}  // namespace

JointPosterior2 dp_range2_single(double theta, std::uint32_t j, std::uint64_t m,
                                 std::uint64_t c1, std::uint64_t c2) {
    validate_range2(theta, j, m, c1, c2);
    const Range2Terms t(theta, j, m);
    const double den = t.log_den(c1, c2);
    if (den == kNegInf)
        throw ZeroProbabilityError("dp_range2_single: zero-probability count configuration");
    std::vector<double> log_probs = range2_kernel(t, c1, c2, c1, c2);
    for (double& v : log_probs) v -= den;
    return finalize(c1, c2, std::move(log_probs));
}

JointPosterior2 dp_range2_multi(double theta, std::uint32_t j, std::uint64_t m,
                                const HashedRow& row1, const HashedRow& row2) {
    if (row1.values.empty() || row1.values.size() != row2.values.size())
        throw std::invalid_argument("dp_range2_multi: rows must be nonempty and of equal depth");
    const Range2Terms t(theta, j, m);
    const std::uint64_t s1 = *std::min_element(row1.values.begin(), row1.values.end());
    const std::uint64_t s2 = *std::min_element(row2.values.begin(), row2.values.end());
    std::vector<double> acc((s1 + 1) * (s2 + 1), 0.0);
    for (std::size_t n = 0; n < row1.values.size(); ++n) {
        validate_range2(theta, j, m, row1.values[n], row2.values[n]);
        const std::vector<double> kernel =
            range2_kernel(t, row1.values[n], row2.values[n], s1, s2);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += kernel[i];
    }
    const double norm = log_sum_exp(acc);
    if (norm == kNegInf || !std::isfinite(norm))
        throw ZeroProbabilityError("dp_range2_multi: zero-probability count configuration");
    for (double& v : acc) v -= norm;
    return finalize(s1, s2, std::move(acc));
}

PosteriorPmf range_sum_posterior(const JointPosterior2& joint) {
    std::vector<double> sums(joint.support1 + joint.support2 + 1, kNegInf);
    for (std::uint64_t l1 = 0; l1 <= joint.support1; ++l1)
        for (std::uint64_t l2 = 0; l2 <= joint.support2; ++l2)
            sums[l1 + l2] = log_add(sums[l1 + l2], joint.log_prob(l1, l2));
    PosteriorPmf pmf;
    pmf.log_probs = std::move(sums);
    return pmf;
}

}  // namespace bnpcms
