#include "bnpcms/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bnpcms/posterior.hpp"
#include "bnpcms/posterior_pyp.hpp"
#include "bnpcms/rng.hpp"

namespace bnpcms {

namespace {

constexpr std::array<std::pair<Estimator, std::string_view>, 9> kEstimatorNames{{
    {Estimator::kCms, "cms"},
    {Estimator::kCmm, "cmm"},
    {Estimator::kDpMean, "dp-mean"},
    {Estimator::kDpMedian, "dp-median"},
    {Estimator::kDpMode, "dp-mode"},
    {Estimator::kPypMean, "pyp-mean"},
    {Estimator::kPypMedian, "pyp-median"},
    {Estimator::kPypMode, "pyp-mode"},
    {Estimator::kTruth, "truth"},
}};

constexpr std::array<FrequencyBin, 9> kBins{{
    {0, 1},
    {1, 2},
    {2, 4},
    {4, 8},
    {8, 16},
    {16, 32},
    {32, 64},
    {64, 128},
    {128, 256},
}};

SummaryKind summary_kind(Estimator estimator) {
    switch (estimator) {
        case Estimator::kDpMean:
        case Estimator::kPypMean:
            return SummaryKind::kMean;
        case Estimator::kDpMedian:
        case Estimator::kPypMedian:
            return SummaryKind::kMedian;
        default:
            return SummaryKind::kMode;
    }
}

// Warms the context's kernel cache for every distinct counter value, in
// parallel over a fixed 32-chunk partition of the sorted values. The chunk
// boundaries (and therefore every computed kernel) are independent of the
// thread count; threads only race on who computes which chunk first.
void prewarm_kernels(const PypPosteriorContext& ctx, const std::vector<std::uint64_t>& counts,
                     std::uint32_t threads) {
    constexpr std::size_t kChunks = 32;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<std::uint32_t>(threads, kChunks);

    std::atomic<std::size_t> next_chunk{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t chunk = next_chunk.fetch_add(1);
            if (chunk >= kChunks || failed.load()) return;
            const std::size_t begin = chunk * counts.size() / kChunks;
            const std::size_t end = (chunk + 1) * counts.size() / kChunks;
            try {
                for (std::size_t i = begin; i < end; ++i) ctx.kernel(counts[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<std::uint64_t> distinct_counter_values(const SketchMatrix& sketch) {
    std::vector<std::uint64_t> values;
    values.reserve(static_cast<std::size_t>(sketch.depth()) * sketch.width());
    for (std::uint32_t n = 0; n < sketch.depth(); ++n)
        for (std::uint32_t b = 0; b < sketch.width(); ++b)
            values.push_back(sketch.at(n, b));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

}  // namespace

Estimator parse_estimator(std::string_view name) {
    for (const auto& [estimator, text] : kEstimatorNames)
        if (text == name) return estimator;
    throw std::invalid_argument("unknown estimator: " + std::string(name));
}

std::string_view estimator_name(Estimator estimator) {
    for (const auto& [value, text] : kEstimatorNames)
        if (value == estimator) return text;
    throw std::invalid_argument("unknown estimator value");
}

bool estimator_needs_dp(Estimator estimator) {
    return estimator == Estimator::kDpMean || estimator == Estimator::kDpMedian ||
           estimator == Estimator::kDpMode;
}

bool estimator_needs_pyp(Estimator estimator) {
    return estimator == Estimator::kPypMean || estimator == Estimator::kPypMedian ||
           estimator == Estimator::kPypMode;
}

std::span<const FrequencyBin> bench_bins() { return kBins; }

std::unordered_map<std::uint64_t, std::uint64_t> exact_counts(
    std::span<const std::uint64_t> tokens) {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    counts.reserve(tokens.size() / 4 + 1);
    for (std::uint64_t id : tokens) ++counts[id];
    return counts;
}

BinnedMaeReport binned_mae(const SketchMatrix& sketch,
                           const std::unordered_map<std::uint64_t, std::uint64_t>& truth,
                           std::span<const Estimator> estimators,
                           const BenchOptions& options) {
    const bool wants_dp =
        std::any_of(estimators.begin(), estimators.end(), estimator_needs_dp);
    const bool wants_pyp =
        std::any_of(estimators.begin(), estimators.end(), estimator_needs_pyp);
    if (wants_dp && !options.has_dp)
        throw std::invalid_argument("binned_mae: dp estimators need dp_theta");
    if (wants_pyp && !options.has_pyp)
        throw std::invalid_argument("binned_mae: pyp estimators need pyp params");

    // Query set: distinct token ids in ascending order, optionally capped by
    // a seeded uniform subsample.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> queries(truth.begin(), truth.end());
    std::sort(queries.begin(), queries.end());
    if (options.sample_cap > 0 && queries.size() > options.sample_cap) {
        std::mt19937_64 rng(derive_seed(options.seed, 0xb53c));
        std::shuffle(queries.begin(), queries.end(), rng);
        queries.resize(options.sample_cap);
        std::sort(queries.begin(), queries.end());
    }

    std::unique_ptr<PypPosteriorContext> dp_ctx, pyp_ctx;
    if (wants_dp)
        dp_ctx = std::make_unique<PypPosteriorContext>(PypParams{0.0, options.dp_theta},
                                                       sketch.width(), sketch.stream_length());
    if (wants_pyp)
        pyp_ctx = std::make_unique<PypPosteriorContext>(options.pyp, sketch.width(),
                                                        sketch.stream_length());
    if (wants_dp || wants_pyp) {
        const std::vector<std::uint64_t> counts = distinct_counter_values(sketch);
        if (dp_ctx) prewarm_kernels(*dp_ctx, counts, options.threads);
        if (pyp_ctx) prewarm_kernels(*pyp_ctx, counts, options.threads);
    }

    BinnedMaeReport report;
    for (Estimator estimator : estimators)
        report.estimators.emplace_back(estimator_name(estimator));
    report.bin_tokens.assign(kBins.size(), 0);
    report.mae.assign(kBins.size(), std::vector<double>(estimators.size(), 0.0));

    for (const auto& [token_id, true_count] : queries) {
        std::size_t bin = kBins.size();
        for (std::size_t b = 0; b < kBins.size(); ++b)
            if (true_count > kBins[b].lo && true_count <= kBins[b].hi) {
                bin = b;
                break;
            }
        if (bin == kBins.size()) continue;

        const HashedRow row = sketch.hashed_row(token_id);
        ++report.bin_tokens[bin];
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            double estimate = 0.0;
            switch (estimators[e]) {
                case Estimator::kCms:
                    estimate = static_cast<double>(cms_estimate(row));
                    break;
                case Estimator::kCmm:
                    estimate = cmm_estimate(row, sketch.stream_length(), sketch.width());
                    break;
                case Estimator::kTruth:
                    estimate = static_cast<double>(true_count);
                    break;
                default: {
                    const PypPosteriorContext& ctx =
                        estimator_needs_dp(estimators[e]) ? *dp_ctx : *pyp_ctx;
                    estimate = posterior_summary(pyp_posterior_multi(ctx, row),
                                                 summary_kind(estimators[e]));
                    break;
                }
            }
            report.mae[bin][e] += std::abs(estimate - static_cast<double>(true_count));
        }
    }

    for (std::size_t b = 0; b < kBins.size(); ++b)
        if (report.bin_tokens[b] > 0)
            for (double& v : report.mae[b]) v /= static_cast<double>(report.bin_tokens[b]);
    return report;
}

std::string BinnedMaeReport::text_table() const {
    std::ostringstream out;
    out << "bin         tokens";
    for (const std::string& name : estimators) {
        out << ' ';
        out.width(11);
        out << name;
    }
    out << '\n';
    for (std::size_t b = 0; b < kBins.size(); ++b) {
        std::ostringstream label;
        label << '(' << kBins[b].lo << ',' << kBins[b].hi << ']';
        out.width(11);
        out.setf(std::ios::left);
        out << label.str();
        out.unsetf(std::ios::left);
        out << ' ';
        out.width(6);
        out << bin_tokens[b];
        out.setf(std::ios::fixed);
        out.precision(3);
        for (double v : mae[b]) {
            out << ' ';
            out.width(11);
            out << v;
        }
        out.unsetf(std::ios::fixed);
        out << '\n';
    }
    return out.str();
}

std::string BinnedMaeReport::csv() const {
    std::ostringstream out;
    out << "bin_lo,bin_hi,tokens";
    for (const std::string& name : estimators) out << ',' << name;
    out << '\n';
    out.precision(17);
    for (std::size_t b = 0; b < kBins.size(); ++b) {
        out << kBins[b].lo << ',' << kBins[b].hi << ',' << bin_tokens[b];
        for (double v : mae[b]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

}  // namespace bnpcms
