#include "bnpcms/posterior_pyp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/log_value.hpp"
#include "bnpcms/quadrature.hpp"
#include "bnpcms/special_functions.hpp"
#include "bnpcms/stable_density.hpp"

namespace bnpcms {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// Tabulated log psi_a(u) = log Int_0^inf g(u x) g(x) x^{1-a} dx on a uniform
// grid in w = log u >= 0. Negative w uses the exact reflection
// psi_a(1/u) = u^{2-a} psi_a(u) (substitute x -> x/u), and w past the grid
// uses the right tail psi_a(u) ~ u^{-(1+alpha)} from the stable density's
// power tail.
struct PsiTable {
    double a = 0.0;
    double alpha = 0.0;
    double step = 0.0;
    double w_max = 0.0;
    std::vector<double> values;

    double log_at(double w) const {
        if (w < 0.0) return (a - 2.0) * w + log_at(-w);
        if (w >= w_max) return values.back() - (1.0 + alpha) * (w - w_max);
        // 6-point Lagrange interpolation on the uniform grid.
        const double s = w / step;
        const auto n = static_cast<std::ptrdiff_t>(values.size());
        std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(s) - 2;
        i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 6);
        double out = 0.0;
        for (int k = 0; k < 6; ++k) {
            double basis = 1.0;
            for (int q = 0; q < 6; ++q) {
                if (q == k) continue;
                basis *= (s - static_cast<double>(i0 + q)) / static_cast<double>(k - q);
            }
            out += basis * values[i0 + k];
        }
        return out;
    }
};

PsiTable build_psi_table(double alpha, double a, double w_max_request) {
    static const ExpSinhRule inner_rule = exp_sinh_rule(10);
    const auto g_nodes = StableNodeCache::instance().get(alpha, 10);

    PsiTable table;
    table.a = a;
    table.alpha = alpha;
    table.step = std::ldexp(1.0, -4);
    const auto n_grid =
        static_cast<std::size_t>(std::ceil(w_max_request / table.step)) + 6;
    table.w_max = table.step * static_cast<double>(n_grid - 1);
    table.values.resize(n_grid);

    const std::size_t n_nodes = inner_rule.nodes.size();
    std::vector<double> cheap(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
        cheap[k] = (*g_nodes)[k] + (1.0 - a) * inner_rule.nodes[k].log_x +
                   inner_rule.nodes[k].log_weight;

    std::vector<double> terms;
    std::vector<std::pair<double, std::size_t>> pending;  // (upper bound, node)
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double w = table.step * static_cast<double>(i);
        terms.clear();
        pending.clear();
        double run_max = kNegInf;
        // Cheap factors plus the series-priced g(u x) where the series
        // converges; elsewhere defer behind a rigorous bound so the costly
        // angular integral only runs for nodes that can matter.
        for (std::size_t k = 0; k < n_nodes; ++k) {
            if (cheap[k] == kNegInf) continue;
            const double arg = w + inner_rule.nodes[k].log_x;
            if (stable_series_eligible(alpha, arg)) {
                const double v = cheap[k] + stable_logpdf_log_arg(alpha, arg);
                if (v == kNegInf) continue;
                run_max = std::max(run_max, v);
                terms.push_back(v);
            } else {
                const double bound = cheap[k] + stable_logpdf_upper_bound(alpha, arg);
                if (bound > kNegInf) pending.emplace_back(bound, k);
            }
        }
        std::sort(pending.begin(), pending.end(),
                  [](const auto& x, const auto& y) { return x.first > y.first; });
        for (const auto& [bound, k] : pending) {
            if (bound < run_max - 80.0) break;
            const double arg = w + inner_rule.nodes[k].log_x;
            const double v = cheap[k] + stable_logpdf_log_arg(alpha, arg);
            if (v == kNegInf) continue;
            run_max = std::max(run_max, v);
            terms.push_back(v);
        }
        if (terms.empty()) {
            table.values[i] =
                i > 0 ? table.values[i - 1] - (1.0 + alpha) * table.step : kNegInf;
            continue;
        }
        table.values[i] = log_sum_exp(terms);
    }
    return table;
}

}  // namespace

struct PypPosteriorContext::Impl {
    PypParams params;
    std::uint32_t j = 0;
    std::uint64_t m = 0;
    int explicit_level = 0;
    double log_k = 0.0;  // log (j-1)^{1/alpha}

    mutable std::once_flag psi_once;
    mutable PsiTable psi_num, psi_den;

    mutable std::mutex rules_mu;
    mutable std::map<int, TanhSinhRule> rules;

    mutable std::shared_mutex cache_mu;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>>
        cache;

    const TanhSinhRule& rule(int level) const {
        std::lock_guard<std::mutex> lock(rules_mu);
        auto it = rules.find(level);
        if (it == rules.end()) it = rules.emplace(level, tanh_sinh_rule(level)).first;
        return it->second;
    }

    void ensure_psi() const {
        std::call_once(psi_once, [this] {
            const double w_max = std::min(500.0, 85.0 + std::max(0.0, log_k));
            psi_num = build_psi_table(params.alpha, params.theta + params.alpha, w_max);
            psi_den = build_psi_table(params.alpha, params.theta, w_max);
        });
    }

    int auto_level(std::uint64_t c) const {
        if (explicit_level > 0) return explicit_level;
        const double s =
            std::min(static_cast<double>(m - c),
                     params.theta + params.alpha + static_cast<double>(c)) +
            2.0;
        const int level =
            static_cast<int>(std::ceil(5.0 + std::log2(5.0 * std::sqrt(s))));
        return std::clamp(level, 9, 16);
    }

    std::vector<double> integral_raw(std::uint64_t c, int level) const;
    std::vector<double> exact_raw(std::uint64_t c) const;
};

PypPosteriorContext::PypPosteriorContext(PypParams params, std::uint32_t j,
                                         std::uint64_t m, int quad_level)
    : impl_(std::make_unique<Impl>()) {
    params.validate();
    if (!(params.theta > 0.0))
        throw std::invalid_argument("PypPosteriorContext: needs theta > 0");
    if (j == 0) throw std::invalid_argument("PypPosteriorContext: needs j >= 1");
    if (m == 0) throw std::invalid_argument("PypPosteriorContext: needs m >= 1");
    if (quad_level != 0 && (quad_level < 9 || quad_level > 16))
        throw std::invalid_argument("PypPosteriorContext: quad level must be 0 or 9..16");
    impl_->params = params;
    impl_->j = j;
    impl_->m = m;
    impl_->explicit_level = quad_level;
    if (params.alpha > 0.0 && j >= 2)
        impl_->log_k = std::log(static_cast<double>(j - 1)) / params.alpha;
}

PypPosteriorContext::~PypPosteriorContext() = default;

const PypParams& PypPosteriorContext::params() const { return impl_->params; }
std::uint32_t PypPosteriorContext::j() const { return impl_->j; }
std::uint64_t PypPosteriorContext::m() const { return impl_->m; }

// Outer integrand in z = r/(1+r), r = u K:
//   I(beta) = K^{-1} Int_0^1 psi(z / ((1-z) K)) z^{m-c} (1-z)^{beta-(m-c)-2} dz
// with beta = theta+m-l+alpha (numerator, psi at theta+alpha) or theta+m+1
// (denominator, psi at theta). The K^{-1} cancels in the ratio and is
// dropped. The l sweep reuses the per-node psi values: only the (1-z)
// exponent depends on l.
std::vector<double> PypPosteriorContext::Impl::integral_raw(std::uint64_t c,
                                                            int level) const {
    ensure_psi();
    const TanhSinhRule& outer = rule(level);
    const double md = static_cast<double>(m);
    const double cd = static_cast<double>(c);
    const double theta = params.theta;
    const double alpha = params.alpha;

    const std::size_t n_nodes = outer.nodes.size();
    std::vector<double> base_num(n_nodes), l1z_arr(n_nodes);
    std::vector<double> den_terms;
    den_terms.reserve(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const auto& node = outer.nodes[k];
        const double near = 0.5 * node.gap;
        const double dz = node.abscissa < 0.0 ? near : 1.0 - near;       // z
        const double lz = node.abscissa < 0.0 ? std::log(near) : std::log1p(-near);
        const double l1z = node.abscissa < 0.0 ? std::log1p(-dz) : std::log(near);
        const double w_arg = lz - l1z - log_k;
        const double lw = std::log(0.5 * node.weight);
        const double shared = (md - cd) * lz + lw;
        base_num[k] = psi_num.log_at(w_arg) + shared + (theta + alpha + cd - 2.0) * l1z;
        l1z_arr[k] = l1z;
        const double den_term = psi_den.log_at(w_arg) + shared + (theta + cd - 1.0) * l1z;
        if (den_term != kNegInf) den_terms.push_back(den_term);
    }
    const double log_den = log_sum_exp(den_terms);

    const double front_shared = std::log(alpha) - std::lgamma(theta + md + 1.0);
    std::vector<double> raw(c + 1);
    std::vector<double> num_terms(n_nodes);
    for (std::uint64_t l = 0; l <= c; ++l) {
        const double ld = static_cast<double>(l);
        double mx = kNegInf;
        for (std::size_t k = 0; k < n_nodes; ++k) {
            num_terms[k] = base_num[k] - ld * l1z_arr[k];
            mx = std::max(mx, num_terms[k]);
        }
        double acc = 0.0;
        if (mx > kNegInf)
            for (std::size_t k = 0; k < n_nodes; ++k)
                if (num_terms[k] > mx - 40.0) acc += std::exp(num_terms[k] - mx);
        const double log_num = mx == kNegInf ? kNegInf : mx + std::log(acc);
        raw[l] = front_shared + log_binomial(c, l) + std::lgamma(theta + alpha + md - ld) +
                 log_rising(1.0 - alpha, l).log_abs() + log_num - log_den;
    }
    return raw;
}

// Finite-sum path, evaluated in 50-digit floats: the alternating binomial
// sums cancel up to ~21 digits near m = 60, far inside the extended-precision
// budget. All inputs (generalized factorial coefficients, rising
// factorials, binomials) are rebuilt in extended precision because the
// cancellation amplifies their rounding as well.
std::vector<double> PypPosteriorContext::Impl::exact_raw(std::uint64_t c) const {
    const double alpha_d = params.alpha;
    const double theta_d = params.theta;
    const std::size_t n_top = m + 2;  // coefficients needed up to n = m+1
    const Big alpha(alpha_d), theta(theta_d);
    const Big t = Big(1) / Big(static_cast<double>(j));

    // Triangular C(n, k; alpha), rows 0..m+1.
    std::vector<std::vector<Big>> gfc(n_top);
    gfc[0] = {Big(1)};
    for (std::size_t n = 0; n + 1 < n_top; ++n) {
        gfc[n + 1].assign(n + 2, Big(0));
        for (std::size_t k = 1; k <= n + 1; ++k) {
            Big keep = k <= n ? (Big(static_cast<double>(n)) - Big(static_cast<double>(k)) * alpha) * gfc[n][k] : Big(0);
            gfc[n + 1][k] = keep + alpha * gfc[n][k - 1];
        }
    }

    auto rising_big = [](const Big& base, std::size_t n) {
        Big out(1);
        for (std::size_t i = 0; i < n; ++i) out *= base + Big(static_cast<double>(i));
        return out;
    };

    // G_{K_n}(1/J; alpha, theta') = sum_k (theta'/alpha)_k C(n,k;alpha) J^-k
    //                               / (theta')_n, with G_{K_0} = 1.
    auto pgf_column = [&](const Big& theta_prime) {
        std::vector<Big> g(n_top);
        g[0] = Big(1);
        const Big ratio = theta_prime / alpha;
        for (std::size_t n = 1; n < n_top; ++n) {
            Big acc(0);
            Big rising_ratio(1);
            Big t_pow(1);
            for (std::size_t k = 1; k <= n; ++k) {
                rising_ratio *= ratio + Big(static_cast<double>(k - 1));
                t_pow *= t;
                acc += rising_ratio * t_pow * gfc[n][k];
            }
            g[n] = acc / rising_big(theta_prime, n);
        }
        return g;
    };
    const std::vector<Big> g_num = pgf_column(theta + alpha);
    const std::vector<Big> g_den = pgf_column(theta);

    const std::uint64_t gap = m - c;
    std::vector<Big> binom_gap(gap + 1);
    binom_gap[0] = Big(1);
    for (std::uint64_t i = 1; i <= gap; ++i)
        binom_gap[i] = binom_gap[i - 1] * Big(static_cast<double>(gap - i + 1)) /
                       Big(static_cast<double>(i));

    auto alternating = [&](const std::vector<Big>& g, std::uint64_t offset) {
        // forward difference sum_d binom(gap, d) (-1)^d g[offset - gap + d];
        // the backward orientation is identical up to a factor (-1)^gap, which
        // would drive both sums negative for odd gaps and trip the positivity
        // guard even though their ratio stays correct.
        Big acc(0);
        for (std::uint64_t d = 0; d <= gap; ++d) {
            const Big term = binom_gap[d] * g[offset - gap + d];
            if (d % 2 == 0)
                acc += term;
            else
                acc -= term;
        }
        return acc;
    };

    const Big a_den = alternating(g_den, m + 1);
    if (!(a_den > 0))
        throw std::domain_error("pyp_posterior_exact: zero-probability count configuration");

    Big binom_cl(1);  // binom(c, l), updated incrementally
    const Big head = theta * t / rising_big(theta, m + 1);
    std::vector<double> raw(c + 1);
    Big rising_one_minus_alpha(1);
    for (std::uint64_t l = 0; l <= c; ++l) {
        if (l > 0) {
            binom_cl = binom_cl * Big(static_cast<double>(c - l + 1)) /
                       Big(static_cast<double>(l));
            rising_one_minus_alpha *= Big(1) - alpha + Big(static_cast<double>(l - 1));
        }
        const Big a_num = alternating(g_num, m - l);
        if (!(a_num > 0)) {
            raw[l] = kNegInf;
            continue;
        }
        const Big p = head * binom_cl * rising_big(theta + alpha, m - l) *
                      rising_one_minus_alpha * a_num / a_den;
        raw[l] = p > 0 ? static_cast<double>(boost::multiprecision::log(p)) : kNegInf;
    }
    return raw;
}

std::shared_ptr<const std::vector<double>> PypPosteriorContext::kernel(
    std::uint64_t c) const {
    {
        std::shared_lock lock(impl_->cache_mu);
        auto it = impl_->cache.find(c);
        if (it != impl_->cache.end()) return it->second;
    }
    const PosteriorPmf pmf = pyp_posterior(*this, c);
    auto entry = std::make_shared<const std::vector<double>>(std::move(pmf.log_probs));
    std::unique_lock lock(impl_->cache_mu);
    auto [it, inserted] = impl_->cache.emplace(c, std::move(entry));
    (void)inserted;  // a concurrent builder may have won; results agree
    return it->second;
}

PosteriorPmf pyp_posterior_exact(const PypPosteriorContext& ctx, std::uint64_t c) {
    const auto& impl = *ctx.impl_;
    if (c > impl.m) throw std::invalid_argument("pyp_posterior_exact: c exceeds m");
    if (impl.params.alpha == 0.0)
        return dp_posterior_single(impl.params.theta, impl.j, c);
    if (impl.m > PypPosteriorContext::kExactCap)
        throw std::domain_error(
            "pyp_posterior_exact: m exceeds the sign-aware-sum cap; use the integral path");
    return normalize_pmf(impl.exact_raw(c));
}

PosteriorPmf pyp_posterior_integral(const PypPosteriorContext& ctx, std::uint64_t c) {
    const auto& impl = *ctx.impl_;
    if (c > impl.m) throw std::invalid_argument("pyp_posterior_integral: c exceeds m");
    if (impl.params.alpha == 0.0)
        throw std::invalid_argument("pyp_posterior_integral: needs alpha in (0, 1)");
    if (impl.j < 2)
        throw std::invalid_argument("pyp_posterior_integral: needs j >= 2 (K = (j-1)^{1/alpha})");
    int level = impl.auto_level(c);
    double drift = 0.0;
    PosteriorPmf pmf = normalize_pmf(impl.integral_raw(c, level), &drift);
    if (drift > 1e-6 && level < 16) {
        pmf = normalize_pmf(impl.integral_raw(c, level + 1), &drift);
    }
    return pmf;
}

PosteriorPmf pyp_posterior(const PypPosteriorContext& ctx, std::uint64_t c) {
    const auto& impl = *ctx.impl_;
    if (impl.params.alpha == 0.0)
        return dp_posterior_single(impl.params.theta, impl.j, c);
    if (impl.m <= PypPosteriorContext::kExactCap) return pyp_posterior_exact(ctx, c);
    return pyp_posterior_integral(ctx, c);
}

PosteriorPmf pyp_posterior_multi(const PypPosteriorContext& ctx, const HashedRow& row,
                                 MultiHashForm form) {
    const auto& impl = *ctx.impl_;
    if (row.values.empty()) throw std::invalid_argument("pyp_posterior_multi: empty row");
    const std::uint64_t support =
        *std::min_element(row.values.begin(), row.values.end());
    std::vector<double> log_weights(support + 1, 0.0);
    for (std::uint64_t c : row.values) {
        const auto kern = ctx.kernel(c);
        for (std::uint64_t l = 0; l <= support; ++l) log_weights[l] += (*kern)[l];
    }
    if (form == MultiHashForm::kPriorCorrected && row.values.size() > 1) {
        const auto log_prior = latent_frequency_log_prior(impl.m, impl.params);
        const double power = static_cast<double>(row.values.size()) - 1.0;
        for (std::uint64_t l = 0; l <= support; ++l) log_weights[l] -= power * log_prior[l];
    }
    return normalize_pmf(std::move(log_weights));
}

double pyp_estimate(const PypPosteriorContext& ctx, const HashedRow& row) {
    return posterior_summary(pyp_posterior_multi(ctx, row), SummaryKind::kMean);
}

}  // namespace bnpcms
