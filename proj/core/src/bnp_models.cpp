#include "bnpcms/bnp_models.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "bnpcms/rng.hpp"
#include "bnpcms/special_functions.hpp"

namespace bnpcms {

namespace {

// Fenwick tree over multiplicity classes r = 1..m with real-valued weights
// M_r (r - alpha); supports point updates and locating the class containing
// a given cumulative offset in O(log m).
class ClassWeights {
  public:
    explicit ClassWeights(std::uint64_t m) : tree_(m + 1, 0.0) {}

    void add(std::uint64_t r, double delta) {
        for (; r < tree_.size(); r += r & (~r + 1)) tree_[r] += delta;
    }

    // Largest prefix with cumulative weight <= target, then the next class.
    std::uint64_t find(double target) const {
        std::uint64_t pos = 0;
        std::uint64_t step = 1;
        while ((step << 1) < tree_.size()) step <<= 1;
        for (; step > 0; step >>= 1) {
            const std::uint64_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        return pos + 1;
    }

  private:
    std::vector<double> tree_;
};

}  // namespace

PartitionStats partition_stats(std::span<const std::uint64_t> tokens) {
    std::unordered_map<std::uint64_t, std::uint64_t> freq;
    freq.reserve(tokens.size());
    for (std::uint64_t t : tokens) ++freq[t];
    PartitionStats stats;
    stats.distinct = freq.size();
    stats.sample_size = tokens.size();
    for (const auto& [sym, r] : freq) {
        (void)sym;
        ++stats.multiplicity_counts[r];
    }
    return stats;
}

StreamSample sample_stream(std::uint64_t m, const PypParams& params, std::uint64_t seed) {
    params.validate();
    if (m == 0) throw std::invalid_argument("sample_stream: m must be >= 1");
    std::vector<std::uint64_t> tokens;
    tokens.reserve(m);

    std::mt19937_64 rng(seed);
    ClassWeights weights(m);
    // symbols_by_mult[r] lists the ids currently at multiplicity r; the
    // position of an id within its list is tracked so a move is a
    // swap-remove.
    std::vector<std::vector<std::uint64_t>> symbols_by_mult(m + 2);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> locator;  // id -> (r, index)

    std::uint64_t distinct = 0;
    auto add_new_symbol = [&] {
        const std::uint64_t id = distinct++;
        locator.emplace_back(1, symbols_by_mult[1].size());
        symbols_by_mult[1].push_back(id);
        weights.add(1, 1.0 - params.alpha);
        tokens.push_back(id);
    };
    auto promote = [&](std::uint64_t r, std::uint64_t index) {
        const std::uint64_t id = symbols_by_mult[r][index];
        auto& from = symbols_by_mult[r];
        from[index] = from.back();
        locator[from[index]].second = index;
        from.pop_back();
        locator[id] = {r + 1, symbols_by_mult[r + 1].size()};
        symbols_by_mult[r + 1].push_back(id);
        weights.add(r, -(static_cast<double>(r) - params.alpha));
        weights.add(r + 1, static_cast<double>(r) + 1.0 - params.alpha);
        tokens.push_back(id);
    };

    add_new_symbol();  // first draw is always a new symbol
    for (std::uint64_t i = 2; i <= m; ++i) {
        const double total = params.theta + static_cast<double>(i - 1);
        const double w_new = params.theta + static_cast<double>(distinct) * params.alpha;
        const double u = uniform_unit(rng) * total;
        if (u < w_new) {
            add_new_symbol();
            continue;
        }
        // Floating-point residue can leave ~1 ulp of weight on an emptied
        // class or push a boundary draw past the last one; settle on the
        // nearest populated class.
        std::uint64_t r = std::min<std::uint64_t>(weights.find(u - w_new), m);
        while (r >= 1 && symbols_by_mult[r].empty()) --r;
        if (r == 0) {
            r = weights.find(u - w_new) + 1;
            while (r <= m && symbols_by_mult[r].empty()) ++r;
            if (r > m) throw std::logic_error("sample_stream: weight bookkeeping failed");
        }
        promote(r, uniform_below(rng, symbols_by_mult[r].size()));
    }

    StreamSample out;
    out.stats = partition_stats(tokens);
    out.tokens = std::move(tokens);
    return out;
}

std::vector<double> dp_marginal_pmf(std::uint64_t m, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("dp_marginal_pmf: needs theta > 0");
    std::vector<double> pmf(m + 1);
    const double md = static_cast<double>(m);
    for (std::uint64_t l = 0; l <= m; ++l) {
        const double ld = static_cast<double>(l);
        const double log_p = std::log(theta) - std::log(theta + md) +
                             log_rising(md - ld + 1.0, l).log_abs() -
                             log_rising(theta + md - ld, l).log_abs();
        pmf[l] = std::exp(log_p);
    }
    return pmf;
}

std::vector<double> latent_frequency_log_prior(std::uint64_t m, const PypParams& params) {
    params.validate();
    if (!(params.theta > 0.0))
        throw std::invalid_argument("latent_frequency_log_prior: needs theta > 0");
    const double log_theta = std::log(params.theta);
    const double log_norm = log_rising(params.theta, m + 1).log_abs();
    std::vector<double> logp(m + 1);
    for (std::uint64_t l = 0; l <= m; ++l) {
        logp[l] = log_theta + log_binomial(m, l) +
                  log_rising(params.theta + params.alpha, m - l).log_abs() +
                  log_rising(1.0 - params.alpha, l).log_abs() - log_norm;
    }
    return logp;
}

double dm_log_likelihood(const SketchMatrix& sketch, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("dm_log_likelihood: needs theta > 0");
    const auto j = static_cast<double>(sketch.width());
    const std::uint64_t m = sketch.stream_length();
    const double row_const =
        std::lgamma(static_cast<double>(m) + 1.0) - log_rising(theta, m).log_abs();
    double total = 0.0;
    for (std::uint32_t row = 0; row < sketch.depth(); ++row) {
        total += row_const;
        for (std::uint32_t b = 0; b < sketch.width(); ++b) {
            const std::uint64_t c = sketch.at(row, b);
            if (c == 0) continue;
            total += log_rising(theta / j, c).log_abs() -
                     std::lgamma(static_cast<double>(c) + 1.0);
        }
    }
    return total;
}

}  // namespace bnpcms
