#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "simdeg/errors.hpp"
#include "simdeg/logspace.hpp"
#include "simdeg/model.hpp"

namespace simdeg {

// log of the number of ordered assignment pairs with similarity number
// exactly S: d^n * C(n,S) * (d-1)^(n-S).
inline LogValue log_pair_population(const ModelParams& params, int S) {
    params.validate();
    if (S < 0 || S > params.n)
        throw parameter_error("log_pair_population: S out of [0, n]");
    double lg = params.n * std::log(static_cast<double>(params.d)) + lchoose(params.n, S) +
                (params.n - S) * std::log(static_cast<double>(params.d - 1));
    return LogValue::from_log(lg);
}

// Ratio of falling factorials [S]_k / [n]_k as an explicit k-term product;
// exact zero when S < k.
inline double falling_factorial_ratio(int S, int n, int k) {
    if (k > n) throw parameter_error("falling_factorial_ratio: k > n");
    if (S < k) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= static_cast<double>(S - i) / static_cast<double>(n - i);
    return r;
}

// log probability that a fixed ordered pair with similarity number S
// satisfies all t independently drawn constraints:
// t * log[ (d^k - q) * (d^k - q - 1 + q*[S]_k/[n]_k) / (d^k * (d^k - 1)) ].
inline LogValue log_pair_sat_prob(const ModelParams& params, int S) {
    params.validate();
    if (S < 0 || S > params.n)
        throw parameter_error("log_pair_sat_prob: S out of [0, n]");
    if (params.t == 0) return LogValue::from_log(0.0);
    double dk = std::pow(static_cast<double>(params.d), params.k);
    double qd = static_cast<double>(params.q);
    double ratio = falling_factorial_ratio(S, params.n, params.k);
    double per = (dk - qd) * (dk - qd - 1.0 + qd * ratio) / (dk * (dk - 1.0));
    return LogValue::from_log(static_cast<double>(params.t) * std::log(per));
}

// Expected counts E|A_S^Sat| of satisfying ordered pairs per similarity
// number, in log space.
struct PairCountProfile {
    ModelParams params;
    std::vector<LogValue> log_counts;  // index S = 0..n

    int n() const { return params.n; }
};

inline PairCountProfile expected_sat_pairs(const ModelParams& params) {
    params.validate();
    PairCountProfile prof;
    prof.params = params;
    prof.log_counts.resize(static_cast<std::size_t>(params.n) + 1);
    for (int S = 0; S <= params.n; ++S)
        prof.log_counts[static_cast<std::size_t>(S)] =
            log_pair_population(params, S) * log_pair_sat_prob(params, S);
    return prof;
}

// log E(N^2): the second moment of the solution count equals the total
// expected count of satisfying ordered pairs.
inline LogValue second_moment_finite(const PairCountProfile& prof) {
    return log_sum(prof.log_counts);
}

// Average similarity degree: sum of (S/n) weighted by the profile, divided
// by the profile total. Scaling the profile by a constant cancels.
inline double avg_similarity_finite(const PairCountProfile& prof) {
    LogValue total = log_sum(prof.log_counts);
    if (total.is_zero())
        throw parameter_error("avg_similarity_finite: undefined for all-zero profile");
    double acc = 0.0;
    for (int S = 0; S <= prof.n(); ++S) {
        const LogValue& w = prof.log_counts[static_cast<std::size_t>(S)];
        if (w.is_zero()) continue;
        acc += (static_cast<double>(S) / prof.n()) * std::exp(w.log() - total.log());
    }
    return acc;
}

// Fraction of the profile mass with similarity degree in (c - eps, c + eps]:
// integer window floor((c-eps)n)+1 .. floor((c+eps)n), clamped to [0, n].
inline double concentration_mass(const PairCountProfile& prof, double center, double eps) {
    if (eps <= 0.0) throw parameter_error("concentration_mass: eps must be positive");
    if (center < 0.0 || center > 1.0)
        throw parameter_error("concentration_mass: center out of [0, 1]");
    LogValue total = log_sum(prof.log_counts);
    if (total.is_zero())
        throw parameter_error("concentration_mass: undefined for all-zero profile");
    int n = prof.n();
    std::int64_t left = static_cast<std::int64_t>(std::floor((center - eps) * n)) + 1;
    std::int64_t right = static_cast<std::int64_t>(std::floor((center + eps) * n));
    left = std::max<std::int64_t>(left, 0);
    right = std::min<std::int64_t>(right, n);
    if (left > right) return 0.0;
    LogValue window = LogValue::zero();
    for (std::int64_t S = left; S <= right; ++S)
        window += prof.log_counts[static_cast<std::size_t>(S)];
    if (window.is_zero()) return 0.0;
    return std::exp(window.log() - total.log());
}

}  // namespace simdeg
