#pragma once

#include <functional>
#include <vector>

#include "bnpcms/log_value.hpp"

namespace bnpcms {

/// Double-exponential (tanh-sinh) rule for finite intervals, canonical on
/// (-1, 1). `gap` holds 1 - |abscissa| computed without cancellation so that
/// integrands with endpoint singularities keep full precision near the ends.
/// Step size is 2^(4-level); level 10 gives ~580 nodes.
struct TanhSinhRule {
    struct Node {
        double abscissa;
        double gap;
        double weight;
    };
    std::vector<Node> nodes;
    int level = 0;
};

/// Companion rule for (0, inf) (exp-sinh map x = exp((pi/2) sinh t)). Nodes
/// and weights are kept in log space because the map spans ~e^(+-300).
struct ExpSinhRule {
    struct Node {
        double log_x;
        double log_weight;
    };
    std::vector<Node> nodes;
    int level = 0;
};

/// Companion rule for (-inf, inf) (sinh-sinh map).
struct SinhSinhRule {
    struct Node {
        double x;
        double weight;
    };
    std::vector<Node> nodes;
    int level = 0;
};

/// Build rules at a given refinement level (>= 1). Deterministic.
TanhSinhRule tanh_sinh_rule(int level = 10);
ExpSinhRule exp_sinh_rule(int level = 10);
SinhSinhRule sinh_sinh_rule(int level = 10);

/// log of Int_a^b exp(f_log(x)) dx for finite a < b. f_log may return -inf
/// where the integrand vanishes; all-(-inf) integrands give -inf. The
/// accumulation is max-shifted, so adding a constant to f_log shifts the
/// result by exactly that constant.
double log_integral(const TanhSinhRule& rule, double a, double b,
                    const std::function<double(double)>& f_log);

/// Variant whose callback receives (x, x - a, b - x); the distance to the
/// nearer endpoint is exact even when it underflows x's precision, so
/// factors like log(b - x) stay accurate arbitrarily close to the ends.
double log_integral(const TanhSinhRule& rule, double a, double b,
                    const std::function<double(double, double, double)>& f_log);

/// log of Int_0^inf exp(f_log_of_log_x(log x)) dx. The callback receives
/// log x, which stays finite where x itself would overflow.
double log_integral_half_line(const ExpSinhRule& rule,
                              const std::function<double(double)>& f_log_of_log_x);

/// log of Int_-inf^inf exp(f_log(x)) dx.
double log_integral_real_line(const SinhSinhRule& rule,
                              const std::function<double(double)>& f_log);

/// Sign-carrying variant for integrands that change sign.
LogValue log_integral_signed(const TanhSinhRule& rule, double a, double b,
                             const std::function<LogValue(double)>& f);

}  // namespace bnpcms
