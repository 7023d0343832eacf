#include "bnpcms/stable_density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnpcms {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("stable_logpdf: alpha must lie strictly in (0, 1)");
}

// Per-alpha series coefficients log|Gamma(k a + 1)/k! sin(k pi a)| and the
// term sign; the density is evaluated ~1e6 times per posterior table, all at
// one alpha, so these are grown lazily per thread.
struct SeriesTable {
    double alpha = -1.0;
    std::vector<long double> log_coef;
    std::vector<int> sign;  // 0 marks vanishing sin(k pi alpha)

    void ensure(double a, int k_max) {
        if (alpha != a) {
            alpha = a;
            log_coef.clear();
            sign.clear();
        }
        constexpr long double kPiL = 3.141592653589793238462643383279502884L;
        for (int k = static_cast<int>(log_coef.size()) + 1; k <= k_max; ++k) {
            const double ka = k * a;
            // sin(k pi a) = 0 iff k a is an integer; evaluating it in floating
            // point instead leaves ~1e-16 junk whose sign is noise, and the
            // cancellation amplifies that junk into the leading digits.
            if (ka == std::nearbyint(ka)) {
                log_coef.push_back(-std::numeric_limits<long double>::infinity());
                sign.push_back(0);
                continue;
            }
            const long double s = sinl(k * kPiL * static_cast<long double>(a));
            log_coef.push_back(lgammal(static_cast<long double>(ka) + 1.0L) -
                               lgammal(static_cast<long double>(k) + 1.0L) +
                               logl(fabsl(s)));
            sign.push_back(((k + 1) % 2 == 0 ? 1 : -1) * (s > 0.0L ? 1 : -1));
        }
    }
};

thread_local SeriesTable tls_series;

// Convergent series g(x) = (1/pi) sum_k (-1)^{k+1} Gamma(k alpha + 1)/k!
// * sin(k pi alpha) x^{-k alpha - 1}. Entire in x^{-alpha}, but partial terms
// grow to ~exp(c k*) with k* ~ (alpha^alpha x^-alpha)^{1/(1-alpha)} before
// decaying, so the long double accumulation refuses when the cancellation
// would exceed its precision headroom and the caller falls back to the
// angular integral.
bool series_logpdf(double alpha, double log_x, double* out) {
    constexpr int kMaxTerms = 220;
    constexpr double kCancelBudget = 12.0;  // ln(max term / result)

    if (!stable_series_eligible(alpha, log_x)) return false;

    tls_series.ensure(alpha, kMaxTerms);
    const long double lx = static_cast<long double>(log_x);
    const long double la = static_cast<long double>(alpha);
    const long double lead = -(la + 1.0L) * lx;  // k = 1 term scale
    long double sum = 0.0L;
    long double max_rel = -std::numeric_limits<long double>::infinity();
    bool converged = false;
    for (int k = 1; k <= kMaxTerms; ++k) {
        if (tls_series.sign[k - 1] == 0) continue;
        const long double rel = tls_series.log_coef[k - 1] - (k * la + 1.0L) * lx - lead;
        max_rel = std::max(max_rel, rel);
        sum += tls_series.sign[k - 1] * expl(rel);
        if (k >= 6 && rel < max_rel - 75.0L) {
            converged = true;
            break;
        }
    }
    if (!converged || !(sum > 0.0L)) return false;
    const long double log_sum_rel = logl(sum);
    if (static_cast<double>(max_rel - log_sum_rel) > kCancelBudget) return false;
    constexpr long double kLogPiL = 1.1447298858494001741434273513530587L;
    *out = static_cast<double>(lead + log_sum_rel - kLogPiL);
    return true;
}

// Kanter's bounded representation:
//   g(x) = rho x^{-(rho+1)} (1/pi) Int_0^pi a(u) exp(-a(u) x^{-rho}) du,
//   rho = alpha/(1-alpha),
//   a(u) = [sin(alpha u)^alpha sin((1-alpha) u)^(1-alpha) / sin(u)]^{1/(1-alpha)}.
// a increases from a(0) = [alpha^alpha (1-alpha)^(1-alpha)]^{1/(1-alpha)} and
// diverges at u = pi, so the integrand vanishes at the right endpoint.
double angular_logpdf(double alpha, double log_x) {
    // The integrand is a smooth positive bell vanishing at u = pi; level 8
    // already leaves the truncation error far below the series' 1e-12.
    static const TanhSinhRule rule = tanh_sinh_rule(8);
    const double rho = alpha / (1.0 - alpha);
    const double log_xi = -rho * log_x;  // xi = x^{-rho}
    const double log_a0 =
        (alpha * std::log(alpha) + (1.0 - alpha) * std::log1p(-alpha)) / (1.0 - alpha);

    if (log_xi > 690.0) return kNegInf;  // xi overflows; density below exp(-1e299)

    const double xi = std::exp(log_xi);
    if (log_a0 + log_xi > 5e4) {
        // Deep left tail: the integral collapses onto u = 0; the endpoint
        // asymptote's absolute log error is O(log xi), negligible against a
        // value below -5e4.
        return std::log(rho) - (rho + 1.0) * log_x - std::log(kPi) + log_a0 -
               std::exp(log_a0 + log_xi);
    }

    auto f_log = [&](double u) {
        const double log_a = (alpha * std::log(std::sin(alpha * u)) +
                              (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                              std::log(std::sin(u))) /
                             (1.0 - alpha);
        return log_a - std::exp(log_a) * xi;
    };
    const double log_int = log_integral(rule, 0.0, kPi, f_log);
    return std::log(rho) - (rho + 1.0) * log_x - std::log(kPi) + log_int;
}

}  // namespace

bool stable_series_eligible(double alpha, double log_x) {
    if (log_x >= 0.0) return true;
    // Interior maximum of the series sits near k* = (alpha^alpha x^-alpha)
    // ^(1/(1-alpha)); past ~48 the cancellation outruns long double.
    const double log_k_star = alpha * (std::log(alpha) - log_x) / (1.0 - alpha);
    return log_k_star <= std::log(48.0);
}

double stable_logpdf_upper_bound(double alpha, double log_x) {
    check_alpha(alpha);
    const double rho = alpha / (1.0 - alpha);
    const double log_a0 =
        (alpha * std::log(alpha) + (1.0 - alpha) * std::log1p(-alpha)) / (1.0 - alpha);
    const double log_xi = -rho * log_x;
    // Body of the density: peak height grows like 1/(1-alpha) as the law
    // concentrates at 1, so pad the constant accordingly.
    if (log_a0 + log_xi <= 0.0) return 2.0 - std::log1p(-alpha);
    // g(x) <= rho x^{-(rho+1)} max_u a(u) e^{-a(u) xi} and a e^{-a xi} is
    // decreasing in a beyond 1/xi, so the endpoint value a0 bounds it. The
    // exponent is shaved by a relative 1e-12 so domination survives rounding
    // even when the pi margin falls below one ulp of the huge negative value.
    if (log_a0 + log_xi > 709.0) return kNegInf;
    return std::log(rho) - (rho + 1.0) * log_x + log_a0 -
           (1.0 - 1e-12) * std::exp(log_a0 + log_xi);
}

double stable_logpdf_log_arg(double alpha, double log_x) {
    check_alpha(alpha);
    if (std::isnan(log_x)) throw std::invalid_argument("stable_logpdf: x must be positive");
    double out;
    if (series_logpdf(alpha, log_x, &out)) return out;
    return angular_logpdf(alpha, log_x);
}

double stable_logpdf(double alpha, double x) {
    check_alpha(alpha);
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("stable_logpdf: x must be positive and finite");
    return stable_logpdf_log_arg(alpha, std::log(x));
}

std::shared_ptr<const std::vector<double>> StableNodeCache::get(double alpha, int level) {
    const auto key = std::make_pair(alpha, level);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
    }
    const ExpSinhRule rule = exp_sinh_rule(level);
    auto values = std::make_shared<std::vector<double>>();
    values->reserve(rule.nodes.size());
    for (const auto& node : rule.nodes)
        values->push_back(stable_logpdf_log_arg(alpha, node.log_x));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = table_.emplace(key, std::move(values));
    (void)inserted;
    return it->second;
}

StableNodeCache& StableNodeCache::instance() {
    static StableNodeCache cache;
    return cache;
}

}  // namespace bnpcms
