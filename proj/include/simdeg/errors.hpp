#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace simdeg {

// Base for everything thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid model parameters, out-of-domain arguments, undefined averages.
class parameter_error : public error {
public:
    using error::error;
};

// Asked for two-root machinery while the (k, q, d) combination has a
// monotone phase portrait (r' > 0 everywhere), or a sign condition that the
// portrait guarantees failed to hold numerically.
class regime_error : public error {
public:
    regime_error(const std::string& what, double r_prime_at_s02)
        : error(what), r_prime_at_s02(r_prime_at_s02) {}
    double r_prime_at_s02;
};

// Enumeration or ensemble size exceeds the configured budget.
class budget_error : public error {
public:
    budget_error(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : error(what), required(required), budget(budget) {}
    std::uint64_t required;
    std::uint64_t budget;
};

// Limit quantities requested exactly at the critical ratio, where the
// limit does not exist.
class threshold_error : public error {
public:
    using error::error;
};

// Laplace machinery invoked at a point with non-negative curvature.
class curvature_error : public error {
public:
    curvature_error(const std::string& what, double f_second)
        : error(what), f_second(f_second) {}
    double f_second;
};

// File / stream failures.
class io_error : public error {
public:
    using error::error;
};

}  // namespace simdeg
