#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "simdeg/errors.hpp"
#include "simdeg/logspace.hpp"
#include "simdeg/model.hpp"

namespace simdeg {

inline constexpr std::uint64_t kDefaultAssignmentBudget = 1ull << 24;

// d^n, saturating; the size of the assignment space to be enumerated.
inline std::uint64_t assignment_space(const ModelParams& p) {
    return pow_saturating(static_cast<std::uint64_t>(p.d), static_cast<std::uint64_t>(p.n));
}

namespace detail {

inline Assignment assignment_from_rank(std::uint64_t rank, int n, int d) {
    Assignment a(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        a[static_cast<std::size_t>(i)] = static_cast<int>(rank % static_cast<std::uint64_t>(d));
        rank /= static_cast<std::uint64_t>(d);
    }
    return a;
}

// Increment the assignment as a mixed-radix odometer (variable 0 most
// significant). Returns false on wraparound.
inline bool advance_assignment(Assignment& a, int d) {
    for (std::size_t i = a.size(); i-- > 0;) {
        if (++a[i] < d) return true;
        a[i] = 0;
    }
    return false;
}

}  // namespace detail

// All satisfying assignments, in ascending mixed-radix rank order regardless
// of thread count. Throws budget_error before touching anything if d^n is
// past the budget.
inline std::vector<Assignment> enumerate_solutions(const Instance& inst,
                                                   std::uint64_t budget = kDefaultAssignmentBudget,
                                                   unsigned threads = 1) {
    inst.params.validate();
    std::uint64_t space = assignment_space(inst.params);
    if (space > budget)
        throw budget_error("enumerate_solutions: d^n = " + std::to_string(space) +
                               " exceeds the assignment budget " + std::to_string(budget),
                           space, budget);
    unsigned T = std::max(1u, threads);
    if (static_cast<std::uint64_t>(T) > space) T = static_cast<unsigned>(space);
    std::vector<std::vector<Assignment>> parts(T);
    auto work = [&](unsigned ti) {
        std::uint64_t lo = space * ti / T;
        std::uint64_t hi = space * (ti + 1) / T;
        if (lo >= hi) return;
        Assignment a = detail::assignment_from_rank(lo, inst.params.n, inst.params.d);
        for (std::uint64_t rk = lo; rk < hi; ++rk) {
            if (is_satisfying(inst, a)) parts[ti].push_back(a);
            detail::advance_assignment(a, inst.params.d);
        }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(T);
        for (unsigned ti = 0; ti < T; ++ti) pool.emplace_back(work, ti);
        for (std::thread& th : pool) th.join();
    }
    std::vector<Assignment> out;
    for (std::vector<Assignment>& p : parts)
        out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return out;
}

// counts[S] = number of ordered solution pairs with similarity number S;
// total mass is N^2 and the diagonal contributes N at S = n.
struct SimilarityHistogram {
    int n = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (std::uint64_t c : counts) s += c;
        return s;
    }
};

inline SimilarityHistogram histogram(std::span<const Assignment> sols, int n) {
    for (const Assignment& a : sols)
        if (static_cast<int>(a.size()) != n)
            throw parameter_error("histogram: solutions disagree on n");
    SimilarityHistogram hist;
    hist.n = n;
    hist.counts.assign(static_cast<std::size_t>(n) + 1, 0);
    hist.counts[static_cast<std::size_t>(n)] += sols.size();  // diagonal pairs
    for (std::size_t i = 0; i < sols.size(); ++i) {
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            int S = similarity_number(sols[i], sols[j]);
            hist.counts[static_cast<std::size_t>(S)] += 2;
        }
    }
    return hist;
}

// sum over ordered pairs of the similarity number, computed coordinatewise
// in O(N n d): each coordinate contributes sum_v (count of value v)^2.
inline std::uint64_t pairwise_agreement_total(std::span<const Assignment> sols, int n, int d) {
    std::uint64_t acc = 0;
    std::vector<std::uint64_t> value_counts(static_cast<std::size_t>(d));
    for (int l = 0; l < n; ++l) {
        std::fill(value_counts.begin(), value_counts.end(), 0);
        for (const Assignment& a : sols) ++value_counts[static_cast<std::size_t>(a[static_cast<std::size_t>(l)])];
        for (std::uint64_t cv : value_counts) acc += cv * cv;
    }
    return acc;
}

inline double avg_similarity(const SimilarityHistogram& hist) {
    std::uint64_t total = hist.total();
    if (total == 0) throw parameter_error("avg_similarity: no solution pairs");
    double num = 0.0;
    for (int S = 0; S <= hist.n; ++S)
        num += static_cast<double>(S) * static_cast<double>(hist.counts[static_cast<std::size_t>(S)]);
    return num / (static_cast<double>(hist.n) * static_cast<double>(total));
}

enum class EnsembleMode { exhaustive_ensemble, monte_carlo };

// Ensemble average of the per-S ordered solution-pair counts: exact over all
// instances (exhaustive) or a seeded sample mean with standard errors.
struct EnsembleEstimate {
    ModelParams params;
    EnsembleMode mode = EnsembleMode::exhaustive_ensemble;
    std::uint64_t instances_sampled = 0;
    std::vector<double> mean_counts;  // index S = 0..n
    std::vector<double> std_err;      // zeros in exhaustive mode
};

namespace detail {

// Exact C(n, k) as uint64, saturating on overflow.
inline std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

// Lexicographic combinadic unranking: the rank-th k-subset of {0..n-1}.
inline std::vector<std::uint64_t> unrank_combination(std::uint64_t rank, std::uint64_t n,
                                                     std::uint64_t k) {
    std::vector<std::uint64_t> out;
    out.reserve(k);
    std::uint64_t x = 0;
    for (std::uint64_t i = 0; i < k; ++i) {
        while (true) {
            std::uint64_t block = binomial_u64(n - 1 - x, k - 1 - i);
            if (rank < block) break;
            rank -= block;
            ++x;
        }
        out.push_back(x);
        ++x;
    }
    return out;
}

struct PairAccumulator {
    std::vector<unsigned __int128> sum;
    std::vector<unsigned __int128> sumsq;

    explicit PairAccumulator(std::size_t bins) : sum(bins, 0), sumsq(bins, 0) {}

    void add(const SimilarityHistogram& hist) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            unsigned __int128 c = hist.counts[i];
            sum[i] += c;
            sumsq[i] += c * c;
        }
    }

    void merge(const PairAccumulator& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
    }
};

}  // namespace detail

struct ExhaustiveOptions {
    std::uint64_t max_instances = 1ull << 20;
    std::uint64_t assignment_budget = kDefaultAssignmentBudget;
};

// Average pair counts over every instance of the ensemble: all M^t ranked
// constraint sequences, M = C(n,k) * C(d^k,q). Exact up to the final division.
inline EnsembleEstimate exhaustive_expected_counts(const ModelParams& params,
                                                   const ExhaustiveOptions& opt = {}) {
    params.validate();
    std::uint64_t dk = params.tuple_space();
    std::uint64_t scopes = detail::binomial_u64(static_cast<std::uint64_t>(params.n),
                                                static_cast<std::uint64_t>(params.k));
    std::uint64_t nogood_sets = detail::binomial_u64(dk, static_cast<std::uint64_t>(params.q));
    if (scopes == UINT64_MAX || nogood_sets == UINT64_MAX ||
        scopes > UINT64_MAX / std::max<std::uint64_t>(nogood_sets, 1))
        throw budget_error("exhaustive_expected_counts: constraint space overflows",
                           UINT64_MAX, opt.max_instances);
    std::uint64_t M = scopes * nogood_sets;
    std::uint64_t total = 1;
    for (std::int64_t i = 0; i < params.t; ++i) {
        if (total > UINT64_MAX / M) {
            total = UINT64_MAX;
            break;
        }
        total *= M;
    }
    if (total > opt.max_instances)
        throw budget_error("exhaustive_expected_counts: M^t = " +
                               (total == UINT64_MAX ? std::string("overflow")
                                                    : std::to_string(total)) +
                               " instances exceeds the budget " +
                               std::to_string(opt.max_instances),
                           total, opt.max_instances);
    std::uint64_t space = assignment_space(params);
    if (space > opt.assignment_budget)
        throw budget_error("exhaustive_expected_counts: d^n exceeds the assignment budget",
                           space, opt.assignment_budget);

    detail::PairAccumulator acc(static_cast<std::size_t>(params.n) + 1);
    Instance inst;
    inst.params = params;
    inst.constraints.resize(static_cast<std::size_t>(params.t));
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        std::uint64_t rem = rank;
        for (std::int64_t ci = params.t; ci-- > 0;) {
            std::uint64_t cr = rem % M;
            rem /= M;
            std::uint64_t scope_rank = cr / nogood_sets;
            std::uint64_t nogood_rank = cr % nogood_sets;
            Constraint& con = inst.constraints[static_cast<std::size_t>(ci)];
            std::vector<std::uint64_t> sc = detail::unrank_combination(
                scope_rank, static_cast<std::uint64_t>(params.n),
                static_cast<std::uint64_t>(params.k));
            con.scope.assign(sc.begin(), sc.end());
            con.nogoods = detail::unrank_combination(nogood_rank, dk,
                                                     static_cast<std::uint64_t>(params.q));
        }
        std::vector<Assignment> sols = enumerate_solutions(inst, opt.assignment_budget);
        acc.add(histogram(sols, params.n));
    }

    EnsembleEstimate est;
    est.params = params;
    est.mode = EnsembleMode::exhaustive_ensemble;
    est.instances_sampled = total;
    est.mean_counts.resize(static_cast<std::size_t>(params.n) + 1);
    est.std_err.assign(static_cast<std::size_t>(params.n) + 1, 0.0);
    for (std::size_t i = 0; i < est.mean_counts.size(); ++i)
        est.mean_counts[i] = static_cast<double>(static_cast<long double>(acc.sum[i]) /
                                                 static_cast<long double>(total));
    return est;
}

struct MonteCarloOptions {
    std::uint64_t samples = 10000;
    std::uint64_t seed = 1;
    std::uint64_t assignment_budget = kDefaultAssignmentBudget;
    unsigned threads = 1;
};

// Sample mean of the per-S pair counts over instances generated with seeds
// seed, seed+1, ... Integer accumulation makes the result independent of the
// thread count.
inline EnsembleEstimate monte_carlo_expected_counts(const ModelParams& params,
                                                    const MonteCarloOptions& opt = {}) {
    params.validate();
    if (opt.samples < 1)
        throw parameter_error("monte_carlo_expected_counts: samples must be >= 1");
    std::uint64_t space = assignment_space(params);
    if (space > opt.assignment_budget)
        throw budget_error("monte_carlo_expected_counts: d^n exceeds the assignment budget",
                           space, opt.assignment_budget);
    unsigned T = std::max(1u, opt.threads);
    if (static_cast<std::uint64_t>(T) > opt.samples) T = static_cast<unsigned>(opt.samples);
    std::size_t bins = static_cast<std::size_t>(params.n) + 1;
    std::vector<detail::PairAccumulator> accs(T, detail::PairAccumulator(bins));
    auto work = [&](unsigned ti) {
        std::uint64_t lo = opt.samples * ti / T;
        std::uint64_t hi = opt.samples * (ti + 1) / T;
        for (std::uint64_t i = lo; i < hi; ++i) {
            Instance inst = generate(params, opt.seed + i);
            std::vector<Assignment> sols = enumerate_solutions(inst, opt.assignment_budget);
            accs[ti].add(histogram(sols, params.n));
        }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(T);
        for (unsigned ti = 0; ti < T; ++ti) pool.emplace_back(work, ti);
        for (std::thread& th : pool) th.join();
    }
    for (unsigned ti = 1; ti < T; ++ti) accs[0].merge(accs[ti]);

    EnsembleEstimate est;
    est.params = params;
    est.mode = EnsembleMode::monte_carlo;
    est.instances_sampled = opt.samples;
    est.mean_counts.resize(bins);
    est.std_err.resize(bins);
    long double m = static_cast<long double>(opt.samples);
    for (std::size_t i = 0; i < bins; ++i) {
        long double sum = static_cast<long double>(accs[0].sum[i]);
        long double sq = static_cast<long double>(accs[0].sumsq[i]);
        est.mean_counts[i] = static_cast<double>(sum / m);
        if (opt.samples >= 2) {
            long double var = (sq - sum * sum / m) / (m - 1.0L);
            if (var < 0) var = 0;
            est.std_err[i] = static_cast<double>(std::sqrt(static_cast<double>(var / m)));
        } else {
            est.std_err[i] = 0.0;
        }
    }
    return est;
}

// Options shared by both ensemble modes; irrelevant fields are ignored.
struct EnsembleOptions {
    std::uint64_t max_instances = 1ull << 20;  // exhaustive-ensemble instance budget
    std::uint64_t samples = 10000;             // Monte Carlo sample count
    std::uint64_t seed = 1;
    std::uint64_t assignment_budget = kDefaultAssignmentBudget;
    unsigned threads = 1;
};

inline EnsembleEstimate ensemble_expected_counts(const ModelParams& params, EnsembleMode mode,
                                                 const EnsembleOptions& opt = {}) {
    if (mode == EnsembleMode::exhaustive_ensemble) {
        ExhaustiveOptions eo;
        eo.max_instances = opt.max_instances;
        eo.assignment_budget = opt.assignment_budget;
        return exhaustive_expected_counts(params, eo);
    }
    MonteCarloOptions mo;
    mo.samples = opt.samples;
    mo.seed = opt.seed;
    mo.assignment_budget = opt.assignment_budget;
    mo.threads = opt.threads;
    return monte_carlo_expected_counts(params, mo);
}

inline double empirical_avg_similarity(const EnsembleEstimate& est) {
    double num = 0.0, den = 0.0;
    for (std::size_t S = 0; S < est.mean_counts.size(); ++S) {
        num += static_cast<double>(S) * est.mean_counts[S];
        den += est.mean_counts[S];
    }
    if (den <= 0.0)
        throw parameter_error("empirical_avg_similarity: ensemble has no solution pairs");
    return num / (static_cast<double>(est.params.n) * den);
}

}  // namespace simdeg
