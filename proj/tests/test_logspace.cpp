#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <simdeg/errors.hpp>
#include <simdeg/logspace.hpp>

using namespace simdeg;

TEST_CASE("LogValue basic semantics", "[logspace]") {
    const LogValue z = LogValue::zero();
    CHECK(z.is_zero());
    CHECK(z.linear() == 0.0);
    CHECK_THROWS_AS(z.log(), parameter_error);

    CHECK(LogValue::from_linear(0.0).is_zero());
    CHECK_THROWS_AS(LogValue::from_linear(-1.0), parameter_error);

    const LogValue two = LogValue::from_linear(2.0);
    CHECK_FALSE(two.is_zero());
    CHECK(two.log() == Catch::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(two.linear() == Catch::Approx(2.0).epsilon(1e-15));

    const LogValue one = LogValue::from_log(0.0);
    CHECK(one.linear() == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("LogValue arithmetic", "[logspace]") {
    const LogValue a = LogValue::from_linear(2.0);
    const LogValue b = LogValue::from_linear(3.0);

    CHECK((a + b).linear() == Catch::Approx(5.0).epsilon(1e-14));
    CHECK((a * b).linear() == Catch::Approx(6.0).epsilon(1e-14));

    const LogValue z = LogValue::zero();
    CHECK((a + z).linear() == Catch::Approx(2.0).epsilon(1e-15));
    CHECK((z + a).linear() == Catch::Approx(2.0).epsilon(1e-15));
    CHECK((a * z).is_zero());
    CHECK((z * a).is_zero());

    LogValue acc = LogValue::zero();
    acc += a;
    acc += b;
    CHECK(acc.linear() == Catch::Approx(5.0).epsilon(1e-14));
    acc *= LogValue::from_linear(2.0);
    CHECK(acc.linear() == Catch::Approx(10.0).epsilon(1e-14));
    acc *= z;
    CHECK(acc.is_zero());

    // Huge magnitudes that would overflow in linear space.
    const LogValue big1 = LogValue::from_log(5000.0);
    const LogValue big2 = LogValue::from_log(5000.0 + std::log(2.0));
    CHECK((big1 + big2).log() == Catch::Approx(5000.0 + std::log(3.0)).epsilon(1e-14));
    CHECK((big1 * big2).log() == Catch::Approx(10000.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("log_sum_exp agrees with long double reference", "[logspace]") {
    CHECK_THROWS_AS((log_sum_exp({})), parameter_error);

    const std::vector<double> small = {std::log(1.0), std::log(2.0), std::log(3.0)};
    CHECK(log_sum_exp(small) == Catch::Approx(std::log(6.0)).epsilon(1e-14));

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> mag(-30.0, 30.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> logs;
        const int m = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < m; ++i) {
            logs.push_back(mag(rng));
        }
        long double ref = 0.0L;
        for (double v : logs) {
            ref += std::exp(static_cast<long double>(v));
        }
        const double expect = static_cast<double>(std::log(ref));
        CHECK(log_sum_exp(logs) == Catch::Approx(expect).epsilon(1e-13));
    }

    // A shifted copy must move the result by exactly the shift, even when the
    // raw exponentials would overflow.
    std::vector<double> shifted = small;
    for (double& v : shifted) {
        v += 2000.0;
    }
    CHECK(log_sum_exp(shifted) == Catch::Approx(std::log(6.0) + 2000.0).epsilon(1e-14));
}

TEST_CASE("log_sum over LogValue handles exact zeros", "[logspace]") {
    std::vector<LogValue> values;
    CHECK(log_sum(values).is_zero());

    values.push_back(LogValue::zero());
    values.push_back(LogValue::from_linear(4.0));
    values.push_back(LogValue::zero());
    values.push_back(LogValue::from_linear(5.0));
    CHECK(log_sum(values).linear() == Catch::Approx(9.0).epsilon(1e-14));

    values.assign(3, LogValue::zero());
    CHECK(log_sum(values).is_zero());
}

TEST_CASE("lchoose matches Pascal's triangle", "[logspace]") {
    std::vector<std::vector<double>> pascal(41);
    for (int n = 0; n <= 40; ++n) {
        pascal[n].assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int k = 1; k < n; ++k) {
            pascal[n][static_cast<std::size_t>(k)] =
                pascal[n - 1][static_cast<std::size_t>(k - 1)] +
                pascal[n - 1][static_cast<std::size_t>(k)];
        }
    }
    for (int n = 0; n <= 40; ++n) {
        for (int k = 0; k <= n; ++k) {
            const double expect = std::log(pascal[n][static_cast<std::size_t>(k)]);
            CHECK(lchoose(n, k) == Catch::Approx(expect).margin(1e-11));
        }
    }
    CHECK(lchoose(5, 0) == 0.0);
    CHECK(lchoose(5, 5) == 0.0);
    CHECK_THROWS_AS(lchoose(5, 6), parameter_error);
    CHECK_THROWS_AS(lchoose(5, -1), parameter_error);
    CHECK_THROWS_AS(lchoose(-1, 0), parameter_error);
}

TEST_CASE("pow_saturating", "[logspace]") {
    CHECK(pow_saturating(2, 10) == 1024);
    CHECK(pow_saturating(10, 0) == 1);
    CHECK(pow_saturating(1, 100) == 1);
    CHECK(pow_saturating(2, 63) == (1ull << 63));
    CHECK(pow_saturating(2, 64) == UINT64_MAX);
    CHECK(pow_saturating(10, 25) == UINT64_MAX);
}
