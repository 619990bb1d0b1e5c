#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "simdeg/errors.hpp"
#include "simdeg/logspace.hpp"
#include "simdeg/rng.hpp"

namespace simdeg {

// Random CSP ensemble: n variables over a d-letter domain, t constraints,
// each owning a k-subset of variables and q forbidden value tuples.
struct ModelParams {
    int n = 0;
    int d = 0;
    int k = 0;
    std::int64_t q = 0;
    std::int64_t t = 0;

    double ratio() const { return static_cast<double>(t) / static_cast<double>(n); }

    // d^k, required to fit comfortably below 2^63 wherever tuples are ranked.
    std::uint64_t tuple_space() const {
        std::uint64_t dk = pow_saturating(static_cast<std::uint64_t>(d),
                                          static_cast<std::uint64_t>(k));
        if (dk > (1ull << 62))
            throw parameter_error("tuple_space: d^k exceeds 2^62, tuple ranks not representable");
        return dk;
    }

    void validate() const {
        if (n < 1) throw parameter_error("params: n must be >= 1 (got " + std::to_string(n) + ")");
        if (d < 2) throw parameter_error("params: d must be >= 2 (got " + std::to_string(d) + ")");
        if (k < 2) throw parameter_error("params: k must be >= 2 (got " + std::to_string(k) + ")");
        if (k > n) throw parameter_error("params: k must be <= n (got k=" + std::to_string(k) +
                                         ", n=" + std::to_string(n) + ")");
        if (t < 0) throw parameter_error("params: t must be >= 0 (got " + std::to_string(t) + ")");
        if (q < 1) throw parameter_error("params: q must be >= 1 (got " + std::to_string(q) + ")");
        // Valid regime: q < d^(k-1). Saturating pow keeps huge d^(k-1) on the
        // permissive side, which is correct (the bound only tightens when
        // d^(k-1) is small).
        std::uint64_t dk1 = pow_saturating(static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(k - 1));
        if (static_cast<std::uint64_t>(q) >= dk1)
            throw parameter_error("params: q must be < d^(k-1) (got q=" + std::to_string(q) +
                                  ", d^(k-1)=" + std::to_string(dk1) + ")");
    }
};

// k-SAT is the (d=2, q=1) slice of the model.
inline ModelParams ksat_params(int n, int k, std::int64_t t) {
    ModelParams p{n, 2, k, 1, t};
    p.validate();
    return p;
}

struct Constraint {
    std::vector<int> scope;                // ascending distinct variable indices
    std::vector<std::uint64_t> nogoods;    // ascending distinct tuple ranks in [0, d^k)

    bool operator==(const Constraint&) const = default;
};

struct Instance {
    ModelParams params;
    std::vector<Constraint> constraints;

    bool operator==(const Instance& o) const {
        return params.n == o.params.n && params.d == o.params.d && params.k == o.params.k &&
               params.q == o.params.q && params.t == o.params.t && constraints == o.constraints;
    }
};

using Assignment = std::vector<int>;

struct AssignmentPair {
    Assignment first;
    Assignment second;
};

// Tuple ranks are mixed-radix base d with scope position 0 most significant.
inline std::vector<int> decode_tuple(std::uint64_t rank, int k, int d) {
    std::vector<int> tuple(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        tuple[static_cast<std::size_t>(i)] = static_cast<int>(rank % static_cast<std::uint64_t>(d));
        rank /= static_cast<std::uint64_t>(d);
    }
    if (rank != 0) throw parameter_error("decode_tuple: rank out of range for d^k");
    return tuple;
}

inline std::uint64_t encode_tuple(const std::vector<int>& tuple, int d) {
    std::uint64_t rank = 0;
    for (int v : tuple) {
        if (v < 0 || v >= d) throw parameter_error("encode_tuple: value out of domain");
        rank = rank * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(v);
    }
    return rank;
}

// Draw an instance: per constraint, a uniform k-subset scope and q distinct
// uniform nogood ranks. Consumption order is scope first, then nogoods, one
// constraint at a time, so instances are reproducible from (params, seed).
inline Instance generate(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    std::uint64_t dk = params.tuple_space();
    SplitMix64 rng(seed);
    Instance inst;
    inst.params = params;
    inst.constraints.reserve(static_cast<std::size_t>(params.t));
    for (std::int64_t c = 0; c < params.t; ++c) {
        Constraint con;
        std::vector<std::uint64_t> vars = sample_distinct_sorted(
            rng, static_cast<std::uint64_t>(params.n), static_cast<std::uint64_t>(params.k));
        con.scope.assign(vars.begin(), vars.end());
        con.nogoods = sample_distinct_sorted(rng, dk, static_cast<std::uint64_t>(params.q));
        inst.constraints.push_back(std::move(con));
    }
    return inst;
}

inline bool is_satisfying(const Instance& inst, const Assignment& a) {
    if (static_cast<int>(a.size()) != inst.params.n)
        throw parameter_error("is_satisfying: assignment length differs from n");
    for (int v : a) {
        if (v < 0 || v >= inst.params.d)
            throw parameter_error("is_satisfying: assignment value out of domain");
    }
    for (const Constraint& con : inst.constraints) {
        std::uint64_t rank = 0;
        for (int var : con.scope)
            rank = rank * static_cast<std::uint64_t>(inst.params.d) +
                   static_cast<std::uint64_t>(a[static_cast<std::size_t>(var)]);
        if (std::binary_search(con.nogoods.begin(), con.nogoods.end(), rank)) return false;
    }
    return true;
}

// Number of coordinates where the two assignments agree.
inline int similarity_number(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size())
        throw parameter_error("similarity_number: assignments differ in length");
    int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++s;
    return s;
}

inline int similarity_number(const AssignmentPair& p) {
    return similarity_number(p.first, p.second);
}

inline double similarity_degree(const AssignmentPair& p) {
    if (p.first.empty()) throw parameter_error("similarity_degree: empty assignments");
    return static_cast<double>(similarity_number(p)) / static_cast<double>(p.first.size());
}

}  // namespace simdeg
