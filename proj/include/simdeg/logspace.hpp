#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "simdeg/errors.hpp"

namespace simdeg {

// Nonnegative quantity stored as log(value), with exact zero kept as a tag
// rather than as -inf so that log arithmetic never mixes infinities.
class LogValue {
public:
    constexpr LogValue() : log_(0.0), zero_(true) {}

    static constexpr LogValue zero() { return LogValue(); }

    static constexpr LogValue from_log(double lg) {
        LogValue v;
        v.log_ = lg;
        v.zero_ = false;
        return v;
    }

    static LogValue from_linear(double x) {
        if (x < 0.0) throw parameter_error("LogValue::from_linear: negative input");
        if (x == 0.0) return zero();
        return from_log(std::log(x));
    }

    constexpr bool is_zero() const { return zero_; }

    double log() const {
        if (zero_) throw parameter_error("LogValue::log: value is exact zero");
        return log_;
    }

    double linear() const { return zero_ ? 0.0 : std::exp(log_); }

    friend LogValue operator*(LogValue a, LogValue b) {
        if (a.zero_ || b.zero_) return zero();
        return from_log(a.log_ + b.log_);
    }

    friend LogValue operator+(LogValue a, LogValue b) {
        if (a.zero_) return b;
        if (b.zero_) return a;
        double hi = std::max(a.log_, b.log_);
        double lo = std::min(a.log_, b.log_);
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }

    LogValue& operator+=(LogValue o) { return *this = *this + o; }
    LogValue& operator*=(LogValue o) { return *this = *this * o; }

private:
    double log_;
    bool zero_;
};

// log(sum of exp(x_i)) with the usual max shift; empty input is an error
// (the log of zero is not representable here).
inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) throw parameter_error("log_sum_exp: empty input");
    double m = *std::max_element(xs.begin(), xs.end());
    if (std::isinf(m) && m < 0) return m;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

inline LogValue log_sum(std::span<const LogValue> xs) {
    double m = 0.0;
    bool any = false;
    for (const LogValue& x : xs) {
        if (x.is_zero()) continue;
        if (!any || x.log() > m) m = x.log();
        any = true;
    }
    if (!any) return LogValue::zero();
    double acc = 0.0;
    for (const LogValue& x : xs) {
        if (!x.is_zero()) acc += std::exp(x.log() - m);
    }
    return LogValue::from_log(m + std::log(acc));
}

// log of the binomial coefficient C(n, k) via lgamma; exact zero cases
// (k < 0 or k > n) are the caller's concern, so they throw.
inline double lchoose(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n)
        throw parameter_error("lchoose: requires 0 <= k <= n");
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// d^e as uint64, saturating to UINT64_MAX on overflow.
inline std::uint64_t pow_saturating(std::uint64_t d, std::uint64_t e) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (d != 0 && r > UINT64_MAX / d) return UINT64_MAX;
        r *= d;
    }
    return r;
}

}  // namespace simdeg
