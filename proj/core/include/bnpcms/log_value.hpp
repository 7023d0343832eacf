#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace bnpcms {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for -inf arguments.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

/// log(e^a - e^b). Requires a >= b; returns -inf on exact cancellation.
inline double log_sub(double a, double b) {
    if (b == kNegInf) return a;
    if (a < b) throw std::invalid_argument("log_sub: negative difference");
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

/// Max-shifted log-sum-exp; empty input and all -inf both yield -inf.
inline double log_sum_exp(std::span<const double> logs) {
    double mx = kNegInf;
    for (double v : logs) mx = std::max(mx, v);
    if (mx == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

/// Signed magnitude in log space. sign() == 0 if and only if the value is 0,
/// in which case log_abs() is -inf. Used where alternating sums or signed
/// integrands must stay in log scale.
class LogValue {
  public:
    constexpr LogValue() : log_abs_(kNegInf), sign_(0) {}

    static LogValue zero() { return LogValue(); }
    static LogValue one() { return from_log(0.0); }

    /// Value e^{la} (sign +1), or zero when la == -inf.
    static LogValue from_log(double la, int sign = 1) {
        LogValue v;
        if (la == kNegInf || sign == 0) return v;
        v.log_abs_ = la;
        v.sign_ = sign > 0 ? 1 : -1;
        return v;
    }

    static LogValue from_value(double x) {
        if (x == 0.0) return zero();
        return from_log(std::log(std::fabs(x)), x > 0 ? 1 : -1);
    }

    double log_abs() const { return log_abs_; }
    int sign() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }

    /// e^{log_abs} with sign; may under/overflow double range.
    double value() const {
        if (sign_ == 0) return 0.0;
        return sign_ * std::exp(log_abs_);
    }

    LogValue operator-() const { return from_log(log_abs_, -sign_); }

    LogValue operator*(const LogValue& o) const {
        if (sign_ == 0 || o.sign_ == 0) return zero();
        return from_log(log_abs_ + o.log_abs_, sign_ * o.sign_);
    }

    LogValue operator/(const LogValue& o) const {
        if (o.sign_ == 0) throw std::domain_error("LogValue: division by zero");
        if (sign_ == 0) return zero();
        return from_log(log_abs_ - o.log_abs_, sign_ * o.sign_);
    }

    LogValue operator+(const LogValue& o) const {
        if (sign_ == 0) return o;
        if (o.sign_ == 0) return *this;
        if (sign_ == o.sign_) return from_log(log_add(log_abs_, o.log_abs_), sign_);
        if (log_abs_ == o.log_abs_) return zero();
        if (log_abs_ > o.log_abs_) return from_log(log_sub(log_abs_, o.log_abs_), sign_);
        return from_log(log_sub(o.log_abs_, log_abs_), o.sign_);
    }

    LogValue operator-(const LogValue& o) const { return *this + (-o); }

    LogValue& operator+=(const LogValue& o) { return *this = *this + o; }
    LogValue& operator*=(const LogValue& o) { return *this = *this * o; }

  private:
    double log_abs_;
    int sign_;
};

}  // namespace bnpcms
