#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <simdeg/errors.hpp>
#include <simdeg/model.hpp>

using namespace simdeg;

TEST_CASE("parameter validation", "[model]") {
    CHECK_NOTHROW(ModelParams{6, 2, 3, 1, 7}.validate());
    CHECK_THROWS_AS((ModelParams{0, 2, 2, 1, 1}.validate()), parameter_error);
    CHECK_THROWS_AS((ModelParams{4, 1, 2, 1, 1}.validate()), parameter_error);
    CHECK_THROWS_AS((ModelParams{4, 2, 1, 1, 1}.validate()), parameter_error);
    CHECK_THROWS_AS((ModelParams{2, 2, 3, 1, 1}.validate()), parameter_error);
    CHECK_THROWS_AS((ModelParams{4, 2, 2, 1, -1}.validate()), parameter_error);
    CHECK_THROWS_AS((ModelParams{4, 2, 2, 0, 1}.validate()), parameter_error);
    // q must stay strictly below d^(k-1).
    CHECK_THROWS_AS((ModelParams{4, 2, 2, 2, 1}.validate()), parameter_error);
    CHECK_THROWS_WITH((ModelParams{4, 2, 2, 2, 1}.validate()),
                      Catch::Matchers::ContainsSubstring("q"));
    CHECK_NOTHROW(ModelParams{4, 3, 2, 2, 1}.validate());
}

TEST_CASE("ksat_params fixes d=2 q=1", "[model]") {
    const ModelParams p = ksat_params(100, 5, 2160);
    CHECK(p.n == 100);
    CHECK(p.d == 2);
    CHECK(p.k == 5);
    CHECK(p.q == 1);
    CHECK(p.t == 2160);
    CHECK(p.ratio() == Catch::Approx(21.6).epsilon(1e-15));
    CHECK_THROWS_AS(ksat_params(3, 5, 1), parameter_error);
}

TEST_CASE("tuple encode and decode", "[model]") {
    CHECK(decode_tuple(0, 3, 3) == std::vector<int>{0, 0, 0});
    CHECK(decode_tuple(26, 3, 3) == std::vector<int>{2, 2, 2});
    CHECK(decode_tuple(5, 3, 2) == std::vector<int>{1, 0, 1});
    for (std::uint64_t r = 0; r < 27; ++r) {
        CHECK(encode_tuple(decode_tuple(r, 3, 3), 3) == r);
    }
    CHECK_THROWS_AS(decode_tuple(27, 3, 3), parameter_error);
    CHECK_THROWS_AS((encode_tuple({0, 3}, 3)), parameter_error);
    CHECK_THROWS_AS((encode_tuple({-1, 0}, 3)), parameter_error);
}

TEST_CASE("generate structure and determinism", "[model]") {
    const ModelParams p{8, 3, 3, 2, 20};
    const Instance a = generate(p, 42);
    const Instance b = generate(p, 42);
    CHECK(a == b);
    CHECK(a.constraints.size() == 20);
    for (const Constraint& c : a.constraints) {
        REQUIRE(c.scope.size() == 3);
        CHECK(c.scope[0] >= 0);
        CHECK(c.scope[2] < 8);
        CHECK(c.scope[0] < c.scope[1]);
        CHECK(c.scope[1] < c.scope[2]);
        REQUIRE(c.nogoods.size() == 2);
        CHECK(c.nogoods[0] < c.nogoods[1]);
        CHECK(c.nogoods[1] < 27);
    }
    const Instance c = generate(p, 43);
    CHECK_FALSE(a == c);

    const Instance empty = generate(ModelParams{10, 3, 3, 8, 0}, 7);
    CHECK(empty.constraints.empty());

    const Instance tiny = generate(ModelParams{2, 2, 2, 1, 1}, 123);
    REQUIRE(tiny.constraints.size() == 1);
    CHECK(tiny.constraints[0].scope == std::vector<int>{0, 1});
    CHECK(tiny.constraints[0].nogoods[0] < 4);
}

TEST_CASE("generated nogoods are uniform across seeds", "[model]") {
    // n=k forces a fixed scope, so only the single nogood rank varies.
    const ModelParams p{2, 2, 2, 1, 12};
    std::vector<std::int64_t> counts(4, 0);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const Instance inst = generate(p, seed);
        for (const Constraint& c : inst.constraints) {
            counts[static_cast<std::size_t>(c.nogoods[0])] += 1;
        }
    }
    const double total = 12.0 * 10000.0;
    const double expect = total / 4.0;
    const double sigma = std::sqrt(total * 0.25 * 0.75);
    for (int v = 0; v < 4; ++v) {
        CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(v)]) - expect) <
              3.0 * sigma);
    }
}

TEST_CASE("similarity number and degree", "[model]") {
    CHECK(similarity_number({0, 0, 0, 0}, {0, 0, 0, 0}) == 4);
    CHECK(similarity_number({0, 0, 0, 0}, {1, 1, 1, 1}) == 0);
    CHECK(similarity_number({0, 1, 2}, {0, 2, 2}) == 2);
    CHECK(similarity_number({1, 0}, {0, 1}) == 0);
    CHECK_THROWS_AS((similarity_number({0, 1}, {0, 1, 2})), parameter_error);

    const AssignmentPair pair{{0, 1, 2, 1}, {0, 2, 2, 0}};
    CHECK(similarity_number(pair) == 2);
    CHECK(similarity_degree(pair) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(similarity_degree({{3, 3, 3, 3, 3, 3, 3}, {3, 3, 3, 3, 3, 3, 3}}) == 1.0);
    CHECK(similarity_degree({{0, 0}, {1, 1}}) == 0.0);
    CHECK_THROWS_AS((similarity_degree({{}, {}})), parameter_error);
}

TEST_CASE("is_satisfying", "[model]") {
    Instance inst;
    inst.params = ModelParams{2, 2, 2, 1, 1};
    inst.constraints.push_back(Constraint{{0, 1}, {0}}); // forbids (0,0)
    CHECK_FALSE(is_satisfying(inst, {0, 0}));
    CHECK(is_satisfying(inst, {0, 1}));
    CHECK(is_satisfying(inst, {1, 0}));
    CHECK(is_satisfying(inst, {1, 1}));
    CHECK_THROWS_AS((is_satisfying(inst, {0})), parameter_error);
    CHECK_THROWS_AS((is_satisfying(inst, {0, 2})), parameter_error);

    Instance free_inst;
    free_inst.params = ModelParams{3, 2, 2, 1, 0};
    CHECK(is_satisfying(free_inst, {1, 0, 1}));

    // Two constraints on one scope forbidding (0,0) and (1,1).
    Instance two;
    two.params = ModelParams{2, 2, 2, 1, 2};
    two.constraints.push_back(Constraint{{0, 1}, {0}});
    two.constraints.push_back(Constraint{{0, 1}, {3}});
    CHECK_FALSE(is_satisfying(two, {0, 0}));
    CHECK(is_satisfying(two, {0, 1}));
    CHECK(is_satisfying(two, {1, 0}));
    CHECK_FALSE(is_satisfying(two, {1, 1}));
}

TEST_CASE("splitmix64 reference stream", "[model]") {
    // Same seed, same stream; consecutive outputs differ.
    SplitMix64 rng(0);
    const std::uint64_t first = rng.next();
    SplitMix64 rng2(0);
    CHECK(rng2.next() == first);
    CHECK(rng2.next() != first);

    // below() never returns >= bound and covers small ranges.
    SplitMix64 rng3(99);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t v = rng3.below(5);
        CHECK(v < 5);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);

    // sample_distinct_sorted returns sorted distinct values in range.
    SplitMix64 rng4(7);
    const std::vector<std::uint64_t> pick = sample_distinct_sorted(rng4, 10, 4);
    REQUIRE(pick.size() == 4);
    for (std::size_t i = 0; i + 1 < pick.size(); ++i) CHECK(pick[i] < pick[i + 1]);
    CHECK(pick.back() < 10);
}
