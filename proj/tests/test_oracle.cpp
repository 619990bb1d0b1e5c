#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include <simdeg/errors.hpp>
#include <simdeg/exact.hpp>
#include <simdeg/model.hpp>
#include <simdeg/oracle.hpp>

using namespace simdeg;

namespace {

Instance single_nogood_instance() {
    Instance inst;
    inst.params = ModelParams{2, 2, 2, 1, 1};
    inst.constraints.push_back(Constraint{{0, 1}, {0}}); // forbids (0,0)
    return inst;
}

} // namespace

TEST_CASE("enumerate_solutions", "[oracle]") {
    const Instance inst = single_nogood_instance();
    const std::vector<Assignment> sols = enumerate_solutions(inst);
    REQUIRE(sols.size() == 3);
    CHECK(sols[0] == Assignment{0, 1});
    CHECK(sols[1] == Assignment{1, 0});
    CHECK(sols[2] == Assignment{1, 1});

    Instance free_inst;
    free_inst.params = ModelParams{3, 2, 2, 1, 0};
    const std::vector<Assignment> all = enumerate_solutions(free_inst);
    REQUIRE(all.size() == 8);
    CHECK(all.front() == Assignment{0, 0, 0});
    CHECK(all.back() == Assignment{1, 1, 1});
    for (std::size_t i = 0; i + 1 < all.size(); ++i) CHECK(all[i] < all[i + 1]);

    // Unsatisfiable: both tuples of a scope pair outlawed across constraints.
    Instance unsat;
    unsat.params = ModelParams{2, 2, 2, 1, 4};
    for (std::uint64_t r = 0; r < 4; ++r)
        unsat.constraints.push_back(Constraint{{0, 1}, {r}});
    CHECK(enumerate_solutions(unsat).empty());
}

TEST_CASE("enumerate_solutions budget", "[oracle]") {
    Instance big;
    big.params = ModelParams{30, 2, 2, 1, 0};
    try {
        enumerate_solutions(big);
        FAIL("expected budget_error");
    } catch (const budget_error& e) {
        CHECK(e.required == (1ull << 30));
        CHECK(e.budget == kDefaultAssignmentBudget);
    }

    Instance small;
    small.params = ModelParams{3, 2, 2, 1, 0};
    try {
        enumerate_solutions(small, 4);
        FAIL("expected budget_error");
    } catch (const budget_error& e) {
        CHECK(e.required == 8);
        CHECK(e.budget == 4);
    }
}

TEST_CASE("enumerate_solutions thread independence", "[oracle]") {
    const Instance inst = generate(ModelParams{8, 2, 3, 1, 10}, 3);
    const std::vector<Assignment> one = enumerate_solutions(inst, kDefaultAssignmentBudget, 1);
    const std::vector<Assignment> four = enumerate_solutions(inst, kDefaultAssignmentBudget, 4);
    const std::vector<Assignment> nine = enumerate_solutions(inst, kDefaultAssignmentBudget, 9);
    CHECK(one == four);
    CHECK(one == nine);
}

TEST_CASE("similarity histogram", "[oracle]") {
    const Instance inst = single_nogood_instance();
    const SimilarityHistogram hist = histogram(enumerate_solutions(inst), 2);
    REQUIRE(hist.counts.size() == 3);
    CHECK(hist.counts[0] == 2);
    CHECK(hist.counts[1] == 4);
    CHECK(hist.counts[2] == 3);
    CHECK(hist.total() == 9);
    CHECK(avg_similarity(hist) == Catch::Approx(5.0 / 9.0).epsilon(1e-15));

    const std::vector<Assignment> lone = {{1, 0, 1}};
    const SimilarityHistogram point = histogram(lone, 3);
    CHECK(point.counts == std::vector<std::uint64_t>{0, 0, 0, 1});

    const SimilarityHistogram empty = histogram(std::vector<Assignment>{}, 2);
    CHECK(empty.total() == 0);
    CHECK_THROWS_AS(avg_similarity(empty), parameter_error);

    CHECK_THROWS_AS((histogram(std::vector<Assignment>{{0, 1}, {0, 1, 1}}, 2)), parameter_error);
}

TEST_CASE("histogram invariants on random instances", "[oracle]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ModelParams p{6, 2 + static_cast<int>(seed % 2), 3, 1, 8};
        const Instance inst = generate(p, seed);
        const std::vector<Assignment> sols = enumerate_solutions(inst);
        const SimilarityHistogram hist = histogram(sols, p.n);
        const std::uint64_t N = sols.size();
        CHECK(hist.total() == N * N);
        CHECK(hist.counts[static_cast<std::size_t>(p.n)] >= N);
        std::uint64_t weighted = 0;
        for (int S = 0; S <= p.n; ++S)
            weighted += static_cast<std::uint64_t>(S) * hist.counts[static_cast<std::size_t>(S)];
        CHECK(weighted == pairwise_agreement_total(sols, p.n, p.d));
        if (N > 0)
            CHECK(avg_similarity(hist) ==
                  Catch::Approx(static_cast<double>(weighted) /
                                (static_cast<double>(p.n) * static_cast<double>(N) *
                                 static_cast<double>(N)))
                      .epsilon(1e-14));
    }
}

TEST_CASE("exhaustive ensemble matches the closed form", "[oracle]") {
    const ModelParams p1{2, 2, 2, 1, 1};
    const EnsembleEstimate est1 = exhaustive_expected_counts(p1);
    CHECK(est1.mode == EnsembleMode::exhaustive_ensemble);
    CHECK(est1.instances_sampled == 4); // M = C(2,2) * C(4,1)
    REQUIRE(est1.mean_counts.size() == 3);
    CHECK(est1.mean_counts[0] == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(est1.mean_counts[1] == Catch::Approx(4.0).epsilon(1e-12));
    CHECK(est1.mean_counts[2] == Catch::Approx(3.0).epsilon(1e-12));
    CHECK(est1.std_err == std::vector<double>(3, 0.0));

    const ModelParams p2{2, 2, 2, 1, 2};
    const EnsembleEstimate est2 = exhaustive_expected_counts(p2);
    CHECK(est2.instances_sampled == 16);
    CHECK(est2.mean_counts[0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(est2.mean_counts[1] == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(est2.mean_counts[2] == Catch::Approx(2.25).epsilon(1e-12));

    // Cross-module agreement on a larger ensemble: M = C(4,2) C(4,1) = 24,
    // t = 3 gives 13824 instances.
    const ModelParams p3{4, 2, 2, 1, 3};
    const EnsembleEstimate est3 = exhaustive_expected_counts(p3);
    CHECK(est3.instances_sampled == 13824);
    const PairCountProfile prof = expected_sat_pairs(p3);
    for (int S = 0; S <= 4; ++S) {
        const double formula = prof.log_counts[static_cast<std::size_t>(S)].linear();
        const double empirical = est3.mean_counts[static_cast<std::size_t>(S)];
        CHECK(std::abs(empirical - formula) <= 1e-9 * std::max(1.0, std::abs(formula)));
    }

    // t = 0: the single empty instance, pair population counts.
    const ModelParams p0{3, 2, 2, 1, 0};
    const EnsembleEstimate est0 = exhaustive_expected_counts(p0);
    CHECK(est0.instances_sampled == 1);
    for (int S = 0; S <= 3; ++S)
        CHECK(est0.mean_counts[static_cast<std::size_t>(S)] ==
              Catch::Approx(log_pair_population(p0, S).linear()).epsilon(1e-12));
}

TEST_CASE("exhaustive ensemble budgets", "[oracle]") {
    ExhaustiveOptions tight;
    tight.max_instances = 100;
    try {
        exhaustive_expected_counts(ModelParams{2, 2, 2, 1, 4}, tight); // 4^4 = 256
        FAIL("expected budget_error");
    } catch (const budget_error& e) {
        CHECK(e.required == 256);
        CHECK(e.budget == 100);
    }

    ExhaustiveOptions no_assignments;
    no_assignments.assignment_budget = 2;
    CHECK_THROWS_AS((exhaustive_expected_counts(ModelParams{2, 2, 2, 1, 1}, no_assignments)),
                    budget_error);
}

TEST_CASE("monte carlo ensemble", "[oracle]") {
    const ModelParams p{6, 2, 3, 1, 9};
    MonteCarloOptions opt;
    opt.samples = 2000;
    opt.seed = 1;
    const EnsembleEstimate est = monte_carlo_expected_counts(p, opt);
    CHECK(est.mode == EnsembleMode::monte_carlo);
    CHECK(est.instances_sampled == 2000);
    REQUIRE(est.mean_counts.size() == 7);

    const PairCountProfile prof = expected_sat_pairs(p);
    for (int S = 0; S <= 6; ++S) {
        const double formula = prof.log_counts[static_cast<std::size_t>(S)].linear();
        const double se = est.std_err[static_cast<std::size_t>(S)];
        CHECK(se > 0.0);
        const double z = (est.mean_counts[static_cast<std::size_t>(S)] - formula) / se;
        CHECK(std::abs(z) < 4.0);
    }

    // Determinism and thread independence (integer accumulation).
    const EnsembleEstimate again = monte_carlo_expected_counts(p, opt);
    CHECK(again.mean_counts == est.mean_counts);
    CHECK(again.std_err == est.std_err);
    MonteCarloOptions threaded = opt;
    threaded.threads = 3;
    const EnsembleEstimate par = monte_carlo_expected_counts(p, threaded);
    CHECK(par.mean_counts == est.mean_counts);
    CHECK(par.std_err == est.std_err);

    // A different seed moves the sample mean.
    MonteCarloOptions other = opt;
    other.seed = 999;
    CHECK(monte_carlo_expected_counts(p, other).mean_counts != est.mean_counts);

    CHECK_THROWS_AS((monte_carlo_expected_counts(p, MonteCarloOptions{0, 1})), parameter_error);

    // Single sample: no standard error.
    MonteCarloOptions lone;
    lone.samples = 1;
    const EnsembleEstimate one = monte_carlo_expected_counts(p, lone);
    CHECK(one.std_err == std::vector<double>(7, 0.0));
}

TEST_CASE("ensemble dispatcher", "[oracle]") {
    const ModelParams p{2, 2, 2, 1, 2};
    EnsembleOptions opt;
    opt.samples = 50;
    opt.seed = 11;
    const EnsembleEstimate ex = ensemble_expected_counts(p, EnsembleMode::exhaustive_ensemble, opt);
    CHECK(ex.mean_counts == exhaustive_expected_counts(p).mean_counts);
    const EnsembleEstimate mc = ensemble_expected_counts(p, EnsembleMode::monte_carlo, opt);
    MonteCarloOptions mo;
    mo.samples = 50;
    mo.seed = 11;
    CHECK(mc.mean_counts == monte_carlo_expected_counts(p, mo).mean_counts);
}

TEST_CASE("empirical average similarity", "[oracle]") {
    const EnsembleEstimate est = exhaustive_expected_counts(ModelParams{2, 2, 2, 1, 1});
    CHECK(empirical_avg_similarity(est) == Catch::Approx(5.0 / 9.0).epsilon(1e-13));

    const EnsembleEstimate free_est = exhaustive_expected_counts(ModelParams{3, 2, 2, 1, 0});
    CHECK(empirical_avg_similarity(free_est) == Catch::Approx(0.5).epsilon(1e-13));

    EnsembleEstimate point;
    point.params = ModelParams{4, 2, 2, 1, 0};
    point.mean_counts.assign(5, 0.0);
    point.mean_counts[4] = 6.0;
    CHECK(empirical_avg_similarity(point) == 1.0);

    EnsembleEstimate zero;
    zero.params = ModelParams{2, 2, 2, 1, 0};
    zero.mean_counts.assign(3, 0.0);
    CHECK_THROWS_AS(empirical_avg_similarity(zero), parameter_error);
}
