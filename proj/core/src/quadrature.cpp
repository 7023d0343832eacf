#include "bnpcms/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bnpcms {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfPi = kPi / 2.0;

// Truncation points chosen so the outermost weights stay inside double
// range: tanh-sinh gaps bottom out near e^-280, exp-sinh log-nodes near
// +-e^316.
constexpr double kTanhSinhTMax = 4.5;
constexpr double kExpSinhTMax = 6.0;
constexpr double kSinhSinhTMax = 5.0;

double step_for_level(int level) {
    if (level < 1) throw std::invalid_argument("quadrature level must be >= 1");
    return std::ldexp(1.0, 4 - level);
}

}  // namespace

TanhSinhRule tanh_sinh_rule(int level) {
    const double h = step_for_level(level);
    TanhSinhRule rule;
    rule.level = level;
    const int n = static_cast<int>(kTanhSinhTMax / h);
    rule.nodes.reserve(2 * n + 1);
    for (int j = -n; j <= n; ++j) {
        const double t = j * h;
        const double u = kHalfPi * std::sinh(t);
        // gap = 1 - tanh(u) = 2 / (1 + e^{2u}) for u >= 0; mirrored otherwise.
        const double au = std::fabs(u);
        const double gap = 2.0 / (1.0 + std::exp(2.0 * au));
        const double sech = 1.0 / std::cosh(u);
        const double w = h * kHalfPi * std::cosh(t) * sech * sech;
        TanhSinhRule::Node node;
        node.abscissa = std::tanh(u);
        node.gap = gap;
        node.weight = w;
        rule.nodes.push_back(node);
    }
    return rule;
}

ExpSinhRule exp_sinh_rule(int level) {
    const double h = step_for_level(level);
    ExpSinhRule rule;
    rule.level = level;
    const int n = static_cast<int>(kExpSinhTMax / h);
    rule.nodes.reserve(2 * n + 1);
    for (int j = -n; j <= n; ++j) {
        const double t = j * h;
        const double log_x = kHalfPi * std::sinh(t);
        ExpSinhRule::Node node;
        node.log_x = log_x;
        node.log_weight = std::log(h * kHalfPi * std::cosh(t)) + log_x;
        rule.nodes.push_back(node);
    }
    return rule;
}

SinhSinhRule sinh_sinh_rule(int level) {
    const double h = step_for_level(level);
    SinhSinhRule rule;
    rule.level = level;
    const int n = static_cast<int>(kSinhSinhTMax / h);
    rule.nodes.reserve(2 * n + 1);
    for (int j = -n; j <= n; ++j) {
        const double t = j * h;
        const double u = kHalfPi * std::sinh(t);
        SinhSinhRule::Node node;
        node.x = std::sinh(u);
        node.weight = h * kHalfPi * std::cosh(t) * std::cosh(u);
        rule.nodes.push_back(node);
    }
    return rule;
}

double log_integral(const TanhSinhRule& rule, double a, double b,
                    const std::function<double(double)>& f_log) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("log_integral: need finite a < b");
    const double half = 0.5 * (b - a);
    std::vector<double> terms;
    terms.reserve(rule.nodes.size());
    for (const auto& node : rule.nodes) {
        // Map to (a, b), measuring from the nearer endpoint to keep
        // endpoint-singular integrands accurate.
        const double x = node.abscissa < 0.0 ? a + half * node.gap : b - half * node.gap;
        const double fl = f_log(x);
        if (fl == kNegInf) continue;
        terms.push_back(fl + std::log(node.weight * half));
    }
    return log_sum_exp(terms);
}

double log_integral(const TanhSinhRule& rule, double a, double b,
                    const std::function<double(double, double, double)>& f_log) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("log_integral: need finite a < b");
    const double half = 0.5 * (b - a);
    const double width = b - a;
    std::vector<double> terms;
    terms.reserve(rule.nodes.size());
    for (const auto& node : rule.nodes) {
        const double near = half * node.gap;
        double x, da, db;
        if (node.abscissa < 0.0) {
            da = near;
            db = width - near;
            x = a + near;
        } else {
            db = near;
            da = width - near;
            x = b - near;
        }
        const double fl = f_log(x, da, db);
        if (fl == kNegInf) continue;
        terms.push_back(fl + std::log(node.weight * half));
    }
    return log_sum_exp(terms);
}

double log_integral_half_line(const ExpSinhRule& rule,
                              const std::function<double(double)>& f_log_of_log_x) {
    std::vector<double> terms;
    terms.reserve(rule.nodes.size());
    for (const auto& node : rule.nodes) {
        const double fl = f_log_of_log_x(node.log_x);
        if (fl == kNegInf) continue;
        terms.push_back(fl + node.log_weight);
    }
    return log_sum_exp(terms);
}

double log_integral_real_line(const SinhSinhRule& rule,
                              const std::function<double(double)>& f_log) {
    std::vector<double> terms;
    terms.reserve(rule.nodes.size());
    for (const auto& node : rule.nodes) {
        const double fl = f_log(node.x);
        if (fl == kNegInf) continue;
        terms.push_back(fl + std::log(node.weight));
    }
    return log_sum_exp(terms);
}

LogValue log_integral_signed(const TanhSinhRule& rule, double a, double b,
                             const std::function<LogValue(double)>& f) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("log_integral_signed: need finite a < b");
    const double half = 0.5 * (b - a);
    // Two max-shifted accumulations, one per sign, combined at the end.
    std::vector<double> pos, neg;
    for (const auto& node : rule.nodes) {
        const double x = node.abscissa < 0.0 ? a + half * node.gap : b - half * node.gap;
        const LogValue fv = f(x);
        if (fv.is_zero()) continue;
        const double term = fv.log_abs() + std::log(node.weight * half);
        (fv.sign() > 0 ? pos : neg).push_back(term);
    }
    const LogValue p = LogValue::from_log(log_sum_exp(pos));
    const LogValue q = LogValue::from_log(log_sum_exp(neg));
    return p - q;
}

}  // namespace bnpcms
