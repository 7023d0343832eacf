#include "bnpcms/enumeration_oracle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bnpcms {

namespace {

double rising(double a, std::uint64_t n) {
    double v = 1.0;
    for (std::uint64_t i = 0; i < n; ++i) v *= a + static_cast<double>(i);
    return v;
}

// pmf of sum_b size_b * Bernoulli(1/j) over the given block sizes.
std::vector<double> bernoulli_convolution(const std::vector<std::uint64_t>& sizes,
                                          std::uint64_t total, double inv_j) {
    std::vector<double> pmf(total + 1, 0.0);
    pmf[0] = 1.0;
    std::uint64_t reach = 0;
    for (std::uint64_t s : sizes) {
        reach += s;
        for (std::uint64_t x = reach; x + 1 > 0; --x) {
            const double stay = pmf[x] * (1.0 - inv_j);
            const double move = x >= s ? pmf[x - s] * inv_j : 0.0;
            pmf[x] = stay + move;
            if (x == 0) break;
        }
    }
    return pmf;
}

}  // namespace

double OracleTable::counts_marginal(std::size_t counts) const {
    double total = 0.0;
    for (std::size_t l = 0; l < n_latent; ++l) total += at(l, counts);
    return total;
}

std::vector<double> OracleTable::conditional(std::size_t counts) const {
    const double norm = counts_marginal(counts);
    if (!(norm > 0.0))
        throw std::domain_error("OracleTable: conditioning on zero-probability counts");
    std::vector<double> out(n_latent);
    for (std::size_t l = 0; l < n_latent; ++l) out[l] = at(l, counts) / norm;
    return out;
}

OracleTable enumeration_oracle(std::uint64_t m, std::uint32_t j, const PypParams& params,
                               int arity, int rows) {
    params.validate();
    if (m > 10) throw std::invalid_argument("enumeration_oracle: m must be <= 10");
    if (j == 0 || j > 4) throw std::invalid_argument("enumeration_oracle: j must be in 1..4");
    if (arity != 1 && arity != 2)
        throw std::invalid_argument("enumeration_oracle: arity must be 1 or 2");
    if (rows != 1 && rows != 2)
        throw std::invalid_argument("enumeration_oracle: rows must be 1 or 2");

    const std::size_t n = m + static_cast<std::size_t>(arity);
    const std::size_t span = m + 1;
    OracleTable table;
    table.m = m;
    table.j = j;
    table.arity = arity;
    table.rows = rows;
    table.n_latent = arity == 1 ? span : span * span;
    table.counts_per_row = table.n_latent;
    table.n_counts =
        rows == 1 ? table.counts_per_row : table.counts_per_row * table.counts_per_row;
    table.probs.assign(table.n_latent * table.n_counts, 0.0);

    const double inv_j = 1.0 / static_cast<double>(j);
    const double eppf_norm = rising(params.theta, n);

    // Per-partition scratch: assignment labels and block sizes.
    std::vector<int> label(n, 0);
    std::vector<std::uint64_t> block_total;   // size over all n elements
    std::vector<std::uint64_t> block_stream;  // size over the first m elements

    // Row-conditional law of the query counts given the partition, reused
    // across rows (bucket draws are i.i.d. across rows).
    std::vector<double> row_pmf(table.counts_per_row);

    auto accumulate_partition = [&](int k) {
        block_total.assign(k, 0);
        block_stream.assign(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++block_total[label[i]];
            if (i < m) ++block_stream[label[i]];
        }
        double weight = 1.0;
        for (int i = 0; i < k; ++i) weight *= params.theta + i * params.alpha;
        for (int b = 0; b < k; ++b) weight *= rising(1.0 - params.alpha, block_total[b] - 1);
        weight /= eppf_norm;

        std::fill(row_pmf.begin(), row_pmf.end(), 0.0);
        std::size_t latent;
        if (arity == 1) {
            const int qa = label[m];
            const std::uint64_t f = block_stream[qa];
            latent = f;
            std::vector<std::uint64_t> others;
            std::uint64_t reach = 0;
            for (int b = 0; b < k; ++b)
                if (b != qa) {
                    others.push_back(block_stream[b]);
                    reach += block_stream[b];
                }
            const auto v = bernoulli_convolution(others, reach, inv_j);
            for (std::uint64_t x = 0; x <= reach; ++x) row_pmf[f + x] = v[x];
        } else {
            const int qa = label[m];
            const int qb = label[m + 1];
            const std::uint64_t f1 = block_stream[qa];
            const std::uint64_t f2 = block_stream[qb];
            latent = f1 * span + f2;
            if (qa == qb) {
                std::vector<std::uint64_t> others;
                std::uint64_t reach = 0;
                for (int b = 0; b < k; ++b)
                    if (b != qa) {
                        others.push_back(block_stream[b]);
                        reach += block_stream[b];
                    }
                const auto v = bernoulli_convolution(others, reach, inv_j);
                for (std::uint64_t x = 0; x <= reach; ++x)
                    row_pmf[(f1 + x) * span + (f2 + x)] = v[x];
            } else {
                std::vector<std::uint64_t> others;
                std::uint64_t reach = 0;
                for (int b = 0; b < k; ++b)
                    if (b != qa && b != qb) {
                        others.push_back(block_stream[b]);
                        reach += block_stream[b];
                    }
                // Shared bucket for the two query blocks: every other block
                // joins it independently with probability 1/j.
                const auto v = bernoulli_convolution(others, reach, inv_j);
                for (std::uint64_t x = 0; x <= reach; ++x)
                    row_pmf[(f1 + f2 + x) * span + (f2 + f1 + x)] += inv_j * v[x];
                // Distinct buckets: each other block lands in the first
                // query's bucket, the second's, or neither.
                if (j >= 2) {
                    std::vector<double> t(span * span, 0.0);
                    t[0] = 1.0;
                    std::uint64_t r1 = 0;
                    for (std::uint64_t s : others) {
                        r1 += s;
                        for (std::uint64_t e1 = r1; e1 + 1 > 0; --e1) {
                            for (std::uint64_t e2 = r1; e2 + 1 > 0; --e2) {
                                double acc = t[e1 * span + e2] * (1.0 - 2.0 * inv_j);
                                if (e1 >= s) acc += t[(e1 - s) * span + e2] * inv_j;
                                if (e2 >= s) acc += t[e1 * span + (e2 - s)] * inv_j;
                                t[e1 * span + e2] = acc;
                                if (e2 == 0) break;
                            }
                            if (e1 == 0) break;
                        }
                    }
                    const double p_distinct = 1.0 - inv_j;
                    for (std::uint64_t e1 = 0; e1 <= r1; ++e1)
                        for (std::uint64_t e2 = 0; e2 + e1 <= r1 + r1 && e2 <= r1; ++e2)
                            row_pmf[(f1 + e1) * span + (f2 + e2)] +=
                                p_distinct * t[e1 * span + e2];
                }
            }
        }

        double* dst = table.probs.data() + latent * table.n_counts;
        if (rows == 1) {
            for (std::size_t c = 0; c < table.counts_per_row; ++c)
                dst[c] += weight * row_pmf[c];
        } else {
            for (std::size_t c1 = 0; c1 < table.counts_per_row; ++c1) {
                if (row_pmf[c1] == 0.0) continue;
                const double w1 = weight * row_pmf[c1];
                double* line = dst + c1 * table.counts_per_row;
                for (std::size_t c2 = 0; c2 < table.counts_per_row; ++c2)
                    line[c2] += w1 * row_pmf[c2];
            }
        }
    };

    // Restricted-growth-string enumeration of set partitions.
    auto enumerate = [&](auto&& self, std::size_t pos, int k) -> void {
        if (pos == n) {
            accumulate_partition(k);
            return;
        }
        for (int b = 0; b <= k; ++b) {
            label[pos] = b;
            self(self, pos + 1, b == k ? k + 1 : k);
        }
    };
    enumerate(enumerate, 0, 0);
    return table;
}

}  // namespace bnpcms
