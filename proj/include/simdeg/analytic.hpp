#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "simdeg/errors.hpp"
#include "simdeg/logspace.hpp"

namespace simdeg {

// Upper working cap for similarity degrees; branch three lives on [s03, 1)
// and every bracket expansion stops here.
inline constexpr double kSCap = 1.0 - 1e-9;

// Relative half-width of the guard band around r_cr inside which limit
// quantities are treated as "exactly at threshold".
inline constexpr double kThresholdGuardRel = 1e-10;

// Asymptotic regime is determined by (k, q, d) only; n drops out.
struct AnalyticContext {
    int k = 0;
    std::int64_t q = 0;
    int d = 0;

    double dk = 0.0;        // d^k
    double log_d = 0.0;
    double log_dm1 = 0.0;   // log(d - 1)
    double log_dk_m1 = 0.0; // log(d^k - 1)
    double log_dk_mq = 0.0; // log(d^k - q)
    double A = 0.0;         // (d^k - q - 1) / q
    double a = 0.0;         // (d^k - 1) / ((k-1)(d^k - q - 1) - q)

    static AnalyticContext create(int k, std::int64_t q, int d) {
        if (d < 2) throw parameter_error("analytic: d must be >= 2");
        if (k < 2) throw parameter_error("analytic: k must be >= 2");
        if (q < 1) throw parameter_error("analytic: q must be >= 1");
        std::uint64_t dk1 = pow_saturating(static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(k - 1));
        if (static_cast<std::uint64_t>(q) >= dk1)
            throw parameter_error("analytic: q must be < d^(k-1) (got q=" + std::to_string(q) +
                                  ", d^(k-1)=" + std::to_string(dk1) + ")");
        AnalyticContext c;
        c.k = k;
        c.q = q;
        c.d = d;
        c.dk = std::pow(static_cast<double>(d), k);
        c.log_d = std::log(static_cast<double>(d));
        c.log_dm1 = std::log(static_cast<double>(d - 1));
        double qd = static_cast<double>(q);
        c.log_dk_m1 = std::log(c.dk - 1.0);
        c.log_dk_mq = std::log(c.dk - qd);
        c.A = (c.dk - qd - 1.0) / qd;
        double a_den = (k - 1) * (c.dk - qd - 1.0) - qd;
        if (!(a_den > 0.0))
            throw parameter_error("analytic: (k-1)(d^k-q-1) - q must be positive");
        c.a = (c.dk - 1.0) / a_den;
        return c;
    }
};

namespace detail {

inline void require_unit(double s, const char* fn) {
    if (!(s >= 0.0 && s <= 1.0))
        throw parameter_error(std::string(fn) + ": s out of [0, 1]");
}

// Bisection to ulp resolution. Endpoints must bracket a sign change; the
// returned point is within one representable double of the root.
template <class F>
double bisect(F&& fn, double lo, double hi, const char* what) {
    double flo = fn(lo);
    if (flo == 0.0) return lo;
    double fhi = fn(hi);
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw regime_error(std::string(what) + ": endpoints do not bracket a sign change",
                           std::numeric_limits<double>::quiet_NaN());
    while (true) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) return mid;
        double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

}  // namespace detail

// L(s) = log s - log(1 - s) + log(d - 1); the zero of L is s = 1/d.
inline double L_of_s(const AnalyticContext& c, double s) {
    if (!(s > 0.0 && s < 1.0)) throw parameter_error("L_of_s: s out of (0, 1)");
    return std::log(s) - std::log1p(-s) + c.log_dm1;
}

// Pair-population exponent h(s) = lim (1/n) log |A_s|.
inline double h(const AnalyticContext& c, double s) {
    detail::require_unit(s, "h");
    if (s == 0.0) return c.log_d + c.log_dm1;
    if (s == 1.0) return c.log_d;
    return c.log_d - s * std::log(s) - (1.0 - s) * std::log1p(-s) + (1.0 - s) * c.log_dm1;
}

inline double h_prime(const AnalyticContext& c, double s) {
    return -L_of_s(c, s);
}

inline double h_second(const AnalyticContext& c, double s) {
    if (!(s > 0.0 && s < 1.0)) throw parameter_error("h_second: s out of (0, 1)");
    return -1.0 / (s * (1.0 - s));
}

// D(s) = d^k - q - 1 + q s^k, the correlation denominator.
inline double D_of_s(const AnalyticContext& c, double s) {
    return c.dk - static_cast<double>(c.q) - 1.0 +
           static_cast<double>(c.q) * std::pow(s, c.k);
}

// Per-constraint log-probability exponent g(s) = -lim (1/t) log p_sat(s).
inline double g(const AnalyticContext& c, double s) {
    detail::require_unit(s, "g");
    return c.k * c.log_d + c.log_dk_m1 - c.log_dk_mq - std::log(D_of_s(c, s));
}

inline double g_prime(const AnalyticContext& c, double s) {
    detail::require_unit(s, "g_prime");
    double qd = static_cast<double>(c.q);
    return -qd * c.k * std::pow(s, c.k - 1) / D_of_s(c, s);
}

inline double g_second(const AnalyticContext& c, double s) {
    detail::require_unit(s, "g_second");
    double qd = static_cast<double>(c.q);
    double D = D_of_s(c, s);
    double sk = std::pow(s, c.k);
    return -qd * c.k * std::pow(s, c.k - 2) * ((c.k - 1) * D - qd * c.k * sk) / (D * D);
}

// Growth exponent f(s, r) = h(s) - r g(s); E|A_s^Sat| = e^{n f + o(n)}.
inline double f(const AnalyticContext& c, double s, double r) {
    return h(c, s) - r * g(c, s);
}

inline double f_prime(const AnalyticContext& c, double s, double r) {
    return h_prime(c, s) - r * g_prime(c, s);
}

inline double f_second(const AnalyticContext& c, double s, double r) {
    return h_second(c, s) - r * g_second(c, s);
}

// Polynomial correction exponent rho(s) = q k (k-1)(s^k - s^(k-1)) / (2 D(s)).
inline double rho(const AnalyticContext& c, double s) {
    detail::require_unit(s, "rho");
    double qd = static_cast<double>(c.q);
    return qd * c.k * (c.k - 1) * (std::pow(s, c.k) - std::pow(s, c.k - 1)) /
           (2.0 * D_of_s(c, s));
}

// Subexponential prefactor phi: E|A_s^Sat| = phi * e^{n f} (1 + o(1)).
// Exactly 1 at the endpoints, where the binomial prefactor degenerates.
inline double phi(const AnalyticContext& c, double s, double r, std::int64_t n) {
    detail::require_unit(s, "phi");
    if (n < 1) throw parameter_error("phi: n must be >= 1");
    if (s == 0.0 || s == 1.0) return 1.0;
    return std::exp(r * rho(c, s)) /
           std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n) * s * (1.0 - s));
}

// Stationarity curve r(s): the ratio at which f'(s, r) = 0. Defined on
// [1/d, 1) with r(1/d) = 0 and r -> +inf as s -> 1.
inline double r_of_s(const AnalyticContext& c, double s) {
    double sd = 1.0 / static_cast<double>(c.d);
    if (!(s >= sd && s < 1.0)) throw parameter_error("r_of_s: s out of [1/d, 1)");
    if (s == sd) return 0.0;
    return (1.0 / c.k) * (c.A / std::pow(s, c.k - 1) + s) * L_of_s(c, s);
}

inline double r_prime(const AnalyticContext& c, double s) {
    double sd = 1.0 / static_cast<double>(c.d);
    if (!(s >= sd && s < 1.0)) throw parameter_error("r_prime: s out of [1/d, 1)");
    double l = (s == sd) ? 0.0 : L_of_s(c, s);
    double sk = std::pow(s, c.k);
    double term1 = (1.0 - c.A * (c.k - 1) / sk) * l;
    double term2 = (c.A / std::pow(s, c.k - 1) + s) / (s * (1.0 - s));
    return (term1 + term2) / c.k;
}

inline double r_second(const AnalyticContext& c, double s) {
    double sd = 1.0 / static_cast<double>(c.d);
    if (!(s >= sd && s < 1.0)) throw parameter_error("r_second: s out of [1/d, 1)");
    double l = (s == sd) ? 0.0 : L_of_s(c, s);
    double sk = std::pow(s, c.k);
    double sk1 = std::pow(s, c.k + 1);
    double term1 = c.A * c.k * (c.k - 1) * l / sk1;
    double term2 = 2.0 * (sk - c.A * (c.k - 1)) / (sk1 * (1.0 - s));
    double term3 = (c.A + sk) * (2.0 * s - 1.0) / (sk1 * (1.0 - s) * (1.0 - s));
    return (term1 + term2 + term3) / c.k;
}

enum class Regime { two_roots, no_transition };

inline const char* regime_name(Regime rg) {
    return rg == Regime::two_roots ? "two_roots" : "no_transition";
}

struct RegimeInfo {
    Regime regime;
    double s02;             // unique inflection of r(s)
    double r_prime_at_s02;  // sign decides the regime
};

// Unique root of r'' on [1/d, 1): r'' is negative at 1/d and positive near 1.
inline double find_s02(const AnalyticContext& c) {
    double lo = 1.0 / static_cast<double>(c.d);
    double hi = kSCap;
    double rlo = r_second(c, lo);
    double rhi = r_second(c, hi);
    if (!(rlo < 0.0))
        throw regime_error("find_s02: r'' not negative at s = 1/d", rlo);
    if (!(rhi > 0.0))
        throw regime_error("find_s02: r'' not positive at the upper cap", rhi);
    return detail::bisect([&](double s) { return r_second(c, s); }, lo, hi, "find_s02");
}

inline RegimeInfo classify(const AnalyticContext& c) {
    double s02 = find_s02(c);
    double rp = r_prime(c, s02);
    return RegimeInfo{rp < 0.0 ? Regime::two_roots : Regime::no_transition, s02, rp};
}

inline Regime regime_check(const AnalyticContext& c) {
    return classify(c).regime;
}

// Roots s01 < s02 < s03 of r'(s); only defined in the two-root regime.
inline std::pair<double, double> find_s01_s03(const AnalyticContext& c, const RegimeInfo& ri) {
    if (ri.regime != Regime::two_roots)
        throw regime_error("find_s01_s03: no transition, r'(s02) = " +
                               std::to_string(ri.r_prime_at_s02) + " >= 0",
                           ri.r_prime_at_s02);
    double lo = 1.0 / static_cast<double>(c.d);
    double s01 = detail::bisect([&](double s) { return r_prime(c, s); }, lo, ri.s02,
                                "find_s01_s03 (left root)");
    double hi = ri.s02;
    for (int i = 0; i < 200 && !(r_prime(c, hi) > 0.0); ++i)
        hi += 0.5 * (kSCap - hi);
    if (!(r_prime(c, hi) > 0.0))
        throw regime_error("find_s01_s03: r' never turns positive right of s02",
                           ri.r_prime_at_s02);
    double s03 = detail::bisect([&](double s) { return r_prime(c, s); }, ri.s02, hi,
                                "find_s01_s03 (right root)");
    return {s01, s03};
}

inline std::pair<double, double> find_s01_s03(const AnalyticContext& c) {
    return find_s01_s03(c, classify(c));
}

enum class Branch { one, two, three };

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::one: return "one";
        case Branch::two: return "two";
        default: return "three";
    }
}

struct PhasePortrait {
    AnalyticContext ctx;
    double s01 = 0.0, s02 = 0.0, s03 = 0.0;
    double r_at_s01 = 0.0, r_at_s03 = 0.0;
    double r_cr = 0.0;
    double s1_at_r_cr = 0.0, s3_at_r_cr = 0.0;  // jump endpoints of the limit similarity
};

namespace detail {

inline double invert_r_increasing(const AnalyticContext& c, double r, double slo, double shi,
                                  const char* what) {
    return bisect([&](double s) { return r_of_s(c, s) - r; }, slo, shi, what);
}

inline double invert_r_decreasing(const AnalyticContext& c, double r, double slo, double shi,
                                  const char* what) {
    return bisect([&](double s) { return r - r_of_s(c, s); }, slo, shi, what);
}

}  // namespace detail

// Inverse of r(s) restricted to one monotone branch:
//   one:   [0, r(s01)]      -> [1/d, s01]   (increasing)
//   two:   [r(s03), r(s01)] -> [s01, s03]   (decreasing)
//   three: [r(s03), r_max)  -> [s03, 1)     (increasing, capped at kSCap)
inline double branch_inverse(const PhasePortrait& pp, Branch b, double r) {
    const AnalyticContext& c = pp.ctx;
    double sd = 1.0 / static_cast<double>(c.d);
    switch (b) {
        case Branch::one: {
            if (!(r >= 0.0 && r <= pp.r_at_s01 * (1.0 + 1e-12)))
                throw parameter_error("branch_inverse: branch one needs r in [0, r(s01)]");
            double rr = std::min(r, pp.r_at_s01);
            return detail::invert_r_increasing(c, rr, sd, pp.s01, "branch one inversion");
        }
        case Branch::two: {
            if (!(r >= pp.r_at_s03 * (1.0 - 1e-12) && r <= pp.r_at_s01 * (1.0 + 1e-12)))
                throw parameter_error(
                    "branch_inverse: branch two needs r in [r(s03), r(s01)]");
            double rr = std::clamp(r, pp.r_at_s03, pp.r_at_s01);
            return detail::invert_r_decreasing(c, rr, pp.s01, pp.s03, "branch two inversion");
        }
        default: {
            if (!(r >= pp.r_at_s03 * (1.0 - 1e-12)))
                throw parameter_error("branch_inverse: branch three needs r >= r(s03)");
            double rr = std::max(r, pp.r_at_s03);
            double hi = pp.s03;
            for (int i = 0; i < 200 && !(r_of_s(c, hi) > rr); ++i)
                hi += 0.5 * (kSCap - hi);
            if (!(r_of_s(c, hi) >= rr))
                throw parameter_error(
                    "branch_inverse: branch three r exceeds the invertible range "
                    "(s capped at 1 - 1e-9)");
            return detail::invert_r_increasing(c, rr, pp.s03, hi, "branch three inversion");
        }
    }
}

namespace detail {

// f-gap F(r) = f(s1(r)) - f(s3(r)) on [r(s03), r(s01)]; needs only the
// bracket landmarks of the portrait, so it can run before r_cr is known.
inline double cap_f_raw(const AnalyticContext& c, const PhasePortrait& pp, double r) {
    double sd = 1.0 / static_cast<double>(c.d);
    double s1 = invert_r_increasing(c, r, sd, pp.s01, "cap F (branch one)");
    double s3 = r <= pp.r_at_s03
                    ? pp.s03
                    : [&] {
                          double hi = pp.s03;
                          for (int i = 0; i < 200 && !(r_of_s(c, hi) > r); ++i)
                              hi += 0.5 * (kSCap - hi);
                          if (!(r_of_s(c, hi) >= r))
                              throw parameter_error(
                                  "cap_f: r exceeds the branch-three invertible range "
                                  "(s capped at 1 - 1e-9)");
                          return invert_r_increasing(c, r, pp.s03, hi, "cap F (branch three)");
                      }();
    return f(c, s1, r) - f(c, s3, r);
}

}  // namespace detail

// Full phase portrait: landmarks, and the critical ratio r_cr where the
// two local maxima of f exchange dominance (unique root of the f-gap).
inline PhasePortrait find_r_cr(const AnalyticContext& c) {
    RegimeInfo ri = classify(c);
    if (ri.regime != Regime::two_roots)
        throw regime_error("find_r_cr: no transition for this (k, q, d), r'(s02) = " +
                               std::to_string(ri.r_prime_at_s02),
                           ri.r_prime_at_s02);
    auto [s01, s03] = find_s01_s03(c, ri);
    PhasePortrait pp;
    pp.ctx = c;
    pp.s01 = s01;
    pp.s02 = ri.s02;
    pp.s03 = s03;
    pp.r_at_s01 = r_of_s(c, s01);
    pp.r_at_s03 = r_of_s(c, s03);
    // For large k the branch-one maximum r(s01) overshoots the largest ratio
    // reachable on branch three (s capped at 1 - 1e-9), so clamp the upper
    // bracket endpoint; the f-gap root sits well below either limit.  The
    // relative inset keeps the endpoint invertible despite the steepness of
    // r(s) next to the cap (one ulp of s moves r by ~1e-5 there).
    double r_hi = std::min(pp.r_at_s01, r_of_s(c, kSCap) * (1.0 - 1e-6));
    double gap_lo = detail::cap_f_raw(c, pp, pp.r_at_s03);
    double gap_hi = detail::cap_f_raw(c, pp, r_hi);
    if (!(gap_lo > 0.0) || !(gap_hi < 0.0))
        throw regime_error("find_r_cr: f-gap does not change sign on [r(s03), r(s01)]",
                           ri.r_prime_at_s02);
    pp.r_cr = detail::bisect([&](double r) { return detail::cap_f_raw(c, pp, r); },
                             pp.r_at_s03, r_hi, "find_r_cr");
    pp.s1_at_r_cr = branch_inverse(pp, Branch::one, pp.r_cr);
    pp.s3_at_r_cr = branch_inverse(pp, Branch::three, pp.r_cr);
    return pp;
}

inline double cap_f(const PhasePortrait& pp, double r) {
    if (!(r >= pp.r_at_s03 * (1.0 - 1e-12) && r <= pp.r_at_s01 * (1.0 + 1e-12)))
        throw parameter_error("cap_f: r out of [r(s03), r(s01)]");
    return detail::cap_f_raw(pp.ctx, pp, std::clamp(r, pp.r_at_s03, pp.r_at_s01));
}

// d/dr of the f-gap; by stationarity of the branches this collapses to
// g(s3) - g(s1) = log D(s1) - log D(s3), which is strictly negative.
inline double cap_f_prime(const PhasePortrait& pp, double r) {
    if (!(r >= pp.r_at_s03 * (1.0 - 1e-12) && r <= pp.r_at_s01 * (1.0 + 1e-12)))
        throw parameter_error("cap_f_prime: r out of [r(s03), r(s01)]");
    double rr = std::clamp(r, pp.r_at_s03, pp.r_at_s01);
    double s1 = branch_inverse(pp, Branch::one, rr);
    double s3 = branch_inverse(pp, Branch::three, rr);
    return std::log(D_of_s(pp.ctx, s1)) - std::log(D_of_s(pp.ctx, s3));
}

struct LimitSimilarity {
    double value;
    Branch branch;
};

// Limit of the average similarity degree: the dominant local maximum of f.
// Jumps from branch one to branch three at r_cr; undefined in the guard band.
inline LimitSimilarity s_av_infinity(const PhasePortrait& pp, double r) {
    if (!(r >= 0.0)) throw parameter_error("s_av_infinity: r must be >= 0");
    if (std::abs(r - pp.r_cr) <= kThresholdGuardRel * pp.r_cr)
        throw threshold_error("s_av_infinity: undefined at the critical ratio r_cr = " +
                              std::to_string(pp.r_cr));
    if (r < pp.r_cr) return {branch_inverse(pp, Branch::one, r), Branch::one};
    return {branch_inverse(pp, Branch::three, r), Branch::three};
}

inline double avg_distance_infinity(const PhasePortrait& pp, double r) {
    return 1.0 - s_av_infinity(pp, r).value;
}

// Laplace peak estimate of sum_S phi e^{n f}: requires strictly negative
// curvature at the expansion point zeta.
inline LogValue laplace_sum_estimate(const AnalyticContext& c, double r, std::int64_t n,
                                     double zeta) {
    if (!(zeta > 0.0 && zeta < 1.0))
        throw parameter_error("laplace_sum_estimate: zeta must lie in (0, 1)");
    if (n < 1) throw parameter_error("laplace_sum_estimate: n must be >= 1");
    double fs = f_second(c, zeta, r);
    if (!(fs < 0.0))
        throw curvature_error("laplace_sum_estimate: f'' >= 0 at zeta (f'' = " +
                                  std::to_string(fs) + ")",
                              fs);
    double lg = std::log(phi(c, zeta, r, n)) +
                0.5 * std::log(2.0 * std::numbers::pi * static_cast<double>(n) / (-fs)) +
                static_cast<double>(n) * f(c, zeta, r);
    return LogValue::from_log(lg);
}

// Asymptotic second moment of the solution count: the dominant Laplace peak,
// or the sum of both peaks inside the threshold guard band.
inline LogValue asymptotic_second_moment(const PhasePortrait& pp, double r, std::int64_t n) {
    if (!(r >= 0.0)) throw parameter_error("asymptotic_second_moment: r must be >= 0");
    const AnalyticContext& c = pp.ctx;
    if (std::abs(r - pp.r_cr) <= kThresholdGuardRel * pp.r_cr) {
        double s1 = branch_inverse(pp, Branch::one, r);
        double s3 = branch_inverse(pp, Branch::three, r);
        return laplace_sum_estimate(c, r, n, s1) + laplace_sum_estimate(c, r, n, s3);
    }
    double zeta = s_av_infinity(pp, r).value;
    return laplace_sum_estimate(c, r, n, zeta);
}

}  // namespace simdeg
