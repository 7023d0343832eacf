// Command-line surface: ingest token streams into sketch snapshots, generate
// Zipf benchmark data, fit prior parameters from a sketch, answer point and
// 2-range queries, and run the binned-MAE benchmark harness.
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 numeric failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bnpcms/bench.hpp"
#include "bnpcms/bnp_models.hpp"
#include "bnpcms/dataset.hpp"
#include "bnpcms/fit.hpp"
#include "bnpcms/hashing.hpp"
#include "bnpcms/posterior.hpp"
#include "bnpcms/posterior_dp.hpp"
#include "bnpcms/posterior_pyp.hpp"
#include "bnpcms/range_query.hpp"
#include "bnpcms/rng.hpp"
#include "bnpcms/sketch.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::vector<std::uint64_t> load_tokens(const std::string& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw bnpcms::IoError("cannot open input file: " + path);
    if (format == "tokens") return bnpcms::read_token_stream(in);
    if (format == "uci-bow") return bnpcms::read_uci_bow(in);
    throw UsageError("unknown input format: " + format);
}

bnpcms::SketchMatrix load_sketch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bnpcms::IoError("cannot open sketch file: " + path);
    return bnpcms::read_sketch(in);
}

struct ParamsRecord {
    double alpha = 0.0;
    double theta = 0.0;
    double objective = 0.0;
    std::uint64_t evaluations = 0;
    std::uint64_t seed = 0;
};

ParamsRecord load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bnpcms::IoError("cannot open params file: " + path);
    ParamsRecord rec;
    if (!(in >> rec.alpha >> rec.theta >> rec.objective >> rec.evaluations >> rec.seed))
        throw bnpcms::IoError("malformed params record in " + path);
    return rec;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw bnpcms::IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw bnpcms::IoError("write failure: " + path);
}

// ---------------------------------------------------------------- ingest --

struct IngestArgs {
    std::string input, format = "tokens", out;
    std::uint32_t width = 320, depth = 2;
    std::uint64_t seed = 1;
};

int cmd_ingest(const IngestArgs& args) {
    const std::vector<std::uint64_t> tokens = load_tokens(args.input, args.format);
    if (tokens.empty()) throw bnpcms::IoError("input holds no tokens: " + args.input);
    bnpcms::SketchMatrix sketch(bnpcms::draw_family(args.depth, args.width, args.seed));
    for (std::uint64_t id : tokens) sketch.update(id);
    std::ofstream out(args.out);
    if (!out) throw bnpcms::IoError("cannot open output file: " + args.out);
    bnpcms::write_sketch(out, sketch);
    if (!out) throw bnpcms::IoError("write failure: " + args.out);
    std::cout << "m=" << sketch.stream_length() << " n=" << sketch.depth()
              << " j=" << sketch.width() << '\n';
    return kExitOk;
}

// --------------------------------------------------------- generate-zipf --

struct ZipfArgs {
    double exponent = 1.3;
    std::uint64_t tokens = 100000;
    std::uint64_t vocab = 100000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate_zipf(const ZipfArgs& args) {
    const std::vector<std::uint64_t> ranks =
        bnpcms::generate_zipf(args.exponent, args.tokens, args.vocab, args.seed);
    std::ofstream out(args.out);
    if (!out) throw bnpcms::IoError("cannot open output file: " + args.out);
    bnpcms::write_lines(out, ranks);
    if (!out) throw bnpcms::IoError("write failure: " + args.out);
    std::cout << "tokens=" << ranks.size() << " vocab=" << args.vocab << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------- fit --

struct FitArgs {
    std::string sketch, model = "pyp", out;
    std::uint64_t m_prime = 0;  // 0 = stream length / 10, capped at 1e5
    std::uint32_t replicates = 25;
    std::uint32_t budget = 50;
    std::uint64_t seed = 1;
};

int cmd_fit(const FitArgs& args) {
    const bnpcms::SketchMatrix sketch = load_sketch(args.sketch);
    std::string record;
    if (args.model == "dp") {
        const double theta = bnpcms::fit_theta_empirical_bayes(sketch);
        bnpcms::FitResult result;
        result.params.alpha = 0.0;
        result.params.theta = theta;
        result.objective = bnpcms::dm_log_likelihood(sketch, theta);
        result.evaluations = 0;
        result.seed = args.seed;
        record = bnpcms::format_fit_record(result);
    } else if (args.model == "pyp") {
        bnpcms::FitConfig cfg;
        cfg.m_prime = args.m_prime == 0 ? bnpcms::default_m_prime(sketch.stream_length())
                                        : args.m_prime;
        cfg.r_replicates = args.replicates;
        cfg.budget = args.budget;
        cfg.seed = args.seed;
        const bnpcms::FitResult result =
            bnpcms::fit_params(bnpcms::sketch_summary(sketch), cfg, sketch.family());
        record = bnpcms::format_fit_record(result);
    } else {
        throw UsageError("unknown model: " + args.model + " (expected dp or pyp)");
    }
    write_text_file(args.out, record + '\n');
    std::cout << record << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------- query --

struct QueryArgs {
    std::string sketch, params, estimator = "cms";
    std::vector<std::string> tokens;
    std::vector<std::string> range2;
};

int cmd_query(const QueryArgs& args) {
    const bnpcms::SketchMatrix sketch = load_sketch(args.sketch);
    const bnpcms::Estimator estimator = [&] {
        try {
            return bnpcms::parse_estimator(args.estimator);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();

    std::optional<ParamsRecord> params;
    if (!args.params.empty()) params = load_params(args.params);
    const bool needs_dp = bnpcms::estimator_needs_dp(estimator);
    const bool needs_pyp = bnpcms::estimator_needs_pyp(estimator);
    if ((needs_dp || needs_pyp) && !params)
        throw UsageError("estimator " + args.estimator + " needs --params");
    if (needs_dp && params->alpha != 0.0)
        throw UsageError("dp estimator given pyp params (alpha != 0); use pyp-* estimators");
    if (needs_pyp && params->alpha == 0.0)
        throw UsageError(
            "pyp estimator given dp params (alpha = 0); the posterior would be the dp one, "
            "use dp-* estimators");

    std::optional<bnpcms::PypPosteriorContext> ctx;
    if (needs_dp || needs_pyp)
        ctx.emplace(bnpcms::PypParams{params->alpha, params->theta}, sketch.width(),
                    sketch.stream_length());

    std::cout.precision(10);
    for (const std::string& token : args.tokens) {
        const bnpcms::HashedRow row = sketch.hashed_row(bnpcms::tokenize(token));
        double estimate = 0.0;
        switch (estimator) {
            case bnpcms::Estimator::kCms:
                estimate = static_cast<double>(bnpcms::cms_estimate(row));
                break;
            case bnpcms::Estimator::kCmm:
                estimate = bnpcms::cmm_estimate(row, sketch.stream_length(), sketch.width());
                break;
            case bnpcms::Estimator::kTruth:
                throw UsageError("estimator truth is only meaningful inside bench");
            default: {
                const bnpcms::PosteriorPmf pmf = bnpcms::pyp_posterior_multi(*ctx, row);
                const bnpcms::SummaryKind kind =
                    estimator == bnpcms::Estimator::kDpMean ||
                            estimator == bnpcms::Estimator::kPypMean
                        ? bnpcms::SummaryKind::kMean
                        : (estimator == bnpcms::Estimator::kDpMedian ||
                                   estimator == bnpcms::Estimator::kPypMedian
                               ? bnpcms::SummaryKind::kMedian
                               : bnpcms::SummaryKind::kMode);
                estimate = bnpcms::posterior_summary(pmf, kind);
                break;
            }
        }
        std::cout << token << ' ' << estimate << '\n';
    }

    if (!args.range2.empty()) {
        if (args.range2.size() != 2) throw UsageError("--range2 expects exactly two tokens");
        if (!params) throw UsageError("--range2 needs --params");
        if (params->alpha != 0.0)
            throw UsageError("--range2 implements the dp form; params must have alpha = 0");
        const bnpcms::HashedRow row1 = sketch.hashed_row(bnpcms::tokenize(args.range2[0]));
        const bnpcms::HashedRow row2 = sketch.hashed_row(bnpcms::tokenize(args.range2[1]));
        const bnpcms::JointPosterior2 joint = bnpcms::dp_range2_multi(
            params->theta, sketch.width(), sketch.stream_length(), row1, row2);
        const bnpcms::PosteriorPmf sum = bnpcms::range_sum_posterior(joint);
        std::cout << args.range2[0] << '+' << args.range2[1] << " mean "
                  << bnpcms::posterior_summary(sum, bnpcms::SummaryKind::kMean) << " median "
                  << bnpcms::posterior_summary(sum, bnpcms::SummaryKind::kMedian) << '\n';
    }
    return kExitOk;
}

// ----------------------------------------------------------------- bench --

struct BenchArgs {
    std::string input, format = "tokens";
    double zipf_exponent = 0.0;  // > 0 selects the synthetic dataset
    std::uint64_t tokens = 100000;
    std::uint64_t vocab = 100000;
    std::string estimators = "cms,cmm,dp-mean,pyp-mean";
    std::uint32_t width = 0, depth = 0;  // 0,0 = the two default configs
    double dp_theta = 0.0;               // 0 = fit from the sketch
    double pyp_alpha = -1.0, pyp_theta = 0.0;  // alpha < 0 = fit from the sketch
    std::uint64_t m_prime = 0;
    std::uint32_t replicates = 25;
    std::uint32_t budget = 50;
    std::uint64_t sample_cap = 0;
    std::uint32_t threads = 0;
    std::uint64_t seed = 1;
    std::string csv;
};

std::vector<bnpcms::Estimator> parse_estimator_list(const std::string& joined) {
    std::vector<bnpcms::Estimator> estimators;
    std::istringstream in(joined);
    std::string name;
    while (std::getline(in, name, ',')) {
        if (name.empty()) continue;
        try {
            estimators.push_back(bnpcms::parse_estimator(name));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (estimators.empty()) throw UsageError("no estimators requested");
    return estimators;
}

int cmd_bench(const BenchArgs& args) {
    std::vector<std::uint64_t> tokens;
    if (args.zipf_exponent > 0.0) {
        const std::vector<std::uint64_t> ranks = bnpcms::generate_zipf(
            args.zipf_exponent, args.tokens, args.vocab, args.seed);
        tokens.reserve(ranks.size());
        for (std::uint64_t r : ranks) tokens.push_back(bnpcms::tokenize(std::to_string(r)));
    } else if (!args.input.empty()) {
        tokens = load_tokens(args.input, args.format);
    } else {
        throw UsageError("bench needs --input or --zipf-exponent");
    }
    if (tokens.empty()) throw bnpcms::IoError("dataset holds no tokens");

    const std::vector<bnpcms::Estimator> estimators = parse_estimator_list(args.estimators);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> configs;  // (depth, width)
    if (args.width != 0 || args.depth != 0) {
        if (args.width == 0 || args.depth == 0)
            throw UsageError("--width and --depth must be given together");
        configs.emplace_back(args.depth, args.width);
    } else {
        configs.emplace_back(2, 320);
        configs.emplace_back(4, 160);
    }

    const auto truth = bnpcms::exact_counts(tokens);
    std::string csv_out;
    for (std::size_t idx = 0; idx < configs.size(); ++idx) {
        const auto [depth, width] = configs[idx];
        bnpcms::SketchMatrix sketch(
            bnpcms::draw_family(depth, width, bnpcms::derive_seed(args.seed, idx)));
        for (std::uint64_t id : tokens) sketch.update(id);

        bnpcms::BenchOptions options;
        options.sample_cap = args.sample_cap;
        options.seed = args.seed;
        options.threads = args.threads;
        const bool wants_dp = std::any_of(estimators.begin(), estimators.end(),
                                          bnpcms::estimator_needs_dp);
        const bool wants_pyp = std::any_of(estimators.begin(), estimators.end(),
                                           bnpcms::estimator_needs_pyp);
        if (wants_dp) {
            options.dp_theta = args.dp_theta > 0.0
                                   ? args.dp_theta
                                   : bnpcms::fit_theta_empirical_bayes(sketch);
            options.has_dp = true;
        }
        if (wants_pyp) {
            if (args.pyp_alpha >= 0.0) {
                if (!(args.pyp_theta > 0.0))
                    throw UsageError("--pyp-alpha needs --pyp-theta > 0");
                options.pyp.alpha = args.pyp_alpha;
                options.pyp.theta = args.pyp_theta;
            } else {
                bnpcms::FitConfig cfg;
                cfg.m_prime = args.m_prime == 0
                                  ? bnpcms::default_m_prime(sketch.stream_length())
                                  : args.m_prime;
                cfg.r_replicates = args.replicates;
                cfg.budget = args.budget;
                cfg.seed = bnpcms::derive_seed(args.seed, 0xf17 + idx);
                const bnpcms::FitResult fitted =
                    bnpcms::fit_params(bnpcms::sketch_summary(sketch), cfg, sketch.family());
                options.pyp = fitted.params;
            }
            options.has_pyp = true;
        }

        const bnpcms::BinnedMaeReport report =
            bnpcms::binned_mae(sketch, truth, estimators, options);

        std::cout << "# config n=" << depth << " j=" << width
                  << " m=" << sketch.stream_length();
        if (options.has_dp) std::cout << " dp_theta=" << options.dp_theta;
        if (options.has_pyp)
            std::cout << " pyp_alpha=" << options.pyp.alpha
                      << " pyp_theta=" << options.pyp.theta;
        std::cout << '\n' << report.text_table();

        std::istringstream csv_rows(report.csv());
        std::string line;
        bool header = true;
        while (std::getline(csv_rows, line)) {
            if (header) {
                if (idx == 0) csv_out += "n,j," + line + '\n';
                header = false;
            } else {
                csv_out += std::to_string(depth) + ',' + std::to_string(width) + ',' +
                           line + '\n';
            }
        }
    }
    if (!args.csv.empty()) write_text_file(args.csv, csv_out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"count-min sketching with Bayesian nonparametric posteriors"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a key=value file (flags win)");

    IngestArgs ingest;
    CLI::App* ingest_cmd =
        app.add_subcommand("ingest", "stream a token file into a sketch snapshot");
    ingest_cmd->add_option("--input", ingest.input, "token file")->required();
    ingest_cmd->add_option("--format", ingest.format, "tokens | uci-bow")
        ->capture_default_str();
    ingest_cmd->add_option("--out", ingest.out, "sketch snapshot path")->required();
    ingest_cmd->add_option("--width,-j", ingest.width, "buckets per hash")
        ->capture_default_str();
    ingest_cmd->add_option("--depth,-n", ingest.depth, "number of hashes")
        ->capture_default_str();
    ingest_cmd->add_option("--seed", ingest.seed, "hash family seed")->capture_default_str();

    ZipfArgs zipf;
    CLI::App* zipf_cmd =
        app.add_subcommand("generate-zipf", "write i.i.d. Zipf ranks, one per line");
    zipf_cmd->add_option("--exponent,-c", zipf.exponent, "Zipf exponent, > 1")
        ->capture_default_str();
    zipf_cmd->add_option("--tokens,-m", zipf.tokens, "number of draws")
        ->capture_default_str();
    zipf_cmd->add_option("--vocab", zipf.vocab, "number of ranks")->capture_default_str();
    zipf_cmd->add_option("--seed", zipf.seed, "generator seed")->capture_default_str();
    zipf_cmd->add_option("--out", zipf.out, "output path")->required();

    FitArgs fit;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "estimate prior parameters from a sketch snapshot");
    fit_cmd->add_option("--sketch", fit.sketch, "sketch snapshot")->required();
    fit_cmd->add_option("--model", fit.model, "dp | pyp")->capture_default_str();
    fit_cmd->add_option("--out", fit.out, "params record path")->required();
    fit_cmd->add_option("--m-prime", fit.m_prime, "synthetic sample size (0 = m/10, <= 1e5)")
        ->capture_default_str();
    fit_cmd->add_option("--replicates", fit.replicates, "Monte Carlo replicates")
        ->capture_default_str();
    fit_cmd->add_option("--budget", fit.budget, "objective evaluations")
        ->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "fit seed")->capture_default_str();

    QueryArgs query;
    CLI::App* query_cmd = app.add_subcommand("query", "estimate token frequencies");
    query_cmd->add_option("--sketch", query.sketch, "sketch snapshot")->required();
    query_cmd->add_option("--params", query.params, "params record from fit");
    query_cmd->add_option("--estimator", query.estimator,
                          "cms | cmm | dp-mean | dp-median | dp-mode | pyp-mean | "
                          "pyp-median | pyp-mode")
        ->capture_default_str();
    query_cmd->add_option("tokens", query.tokens, "tokens to query");
    query_cmd->add_option("--range2", query.range2,
                          "two tokens; prints posterior mean/median of their total")
        ->expected(2);

    BenchArgs bench;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "binned mean-absolute-error comparison");
    bench_cmd->add_option("--input", bench.input, "token file");
    bench_cmd->add_option("--format", bench.format, "tokens | uci-bow")
        ->capture_default_str();
    bench_cmd->add_option("--zipf-exponent", bench.zipf_exponent,
                          "generate a Zipf stream instead of reading --input");
    bench_cmd->add_option("--tokens,-m", bench.tokens, "Zipf stream length")
        ->capture_default_str();
    bench_cmd->add_option("--vocab", bench.vocab, "Zipf vocabulary")->capture_default_str();
    bench_cmd->add_option("--estimators", bench.estimators, "comma-separated list")
        ->capture_default_str();
    bench_cmd->add_option("--width,-j", bench.width, "buckets per hash (with --depth)");
    bench_cmd->add_option("--depth,-n", bench.depth, "hashes (with --width)");
    bench_cmd->add_option("--dp-theta", bench.dp_theta, "skip the dp fit, use this theta");
    bench_cmd->add_option("--pyp-alpha", bench.pyp_alpha,
                          "skip the pyp fit, use this alpha (with --pyp-theta)");
    bench_cmd->add_option("--pyp-theta", bench.pyp_theta, "theta for --pyp-alpha");
    bench_cmd->add_option("--m-prime", bench.m_prime, "pyp fit synthetic sample size");
    bench_cmd->add_option("--replicates", bench.replicates, "pyp fit replicates")
        ->capture_default_str();
    bench_cmd->add_option("--budget", bench.budget, "pyp fit evaluations")
        ->capture_default_str();
    bench_cmd->add_option("--sample-cap", bench.sample_cap,
                          "query at most this many distinct tokens (0 = all)")
        ->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads,
                          "kernel precompute threads (0 = hardware)")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "seed for hashing, fitting, sampling")
        ->capture_default_str();
    bench_cmd->add_option("--csv", bench.csv, "also write machine-readable rows here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(ingest);
        if (zipf_cmd->parsed()) return cmd_generate_zipf(zipf);
        if (fit_cmd->parsed()) return cmd_fit(fit);
        if (query_cmd->parsed()) return cmd_query(query);
        if (bench_cmd->parsed()) return cmd_bench(bench);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const bnpcms::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
