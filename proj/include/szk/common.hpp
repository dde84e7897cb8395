// Shared basics: scalar aliases, error types, small numeric helpers.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>
#include <cstdint>

namespace szk {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Base error. Subclasses distinguish "bad input / bad config" from
// "the computation could not be carried out to the requested accuracy".
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments, inadmissible model/metric combinations, malformed config.
struct invalid_argument_error : error {
    using error::error;
};

// Numeric failures: Newton did not converge, quadrature tolerance not met,
// non-positive-definite Levi form, rank-deficient fit, aliasing detected.
struct numeric_error : error {
    using error::error;
};

inline double sqr(double x) { return x * x; }

// Kahan–Babuska compensated accumulator; keeps long sums of mixed-magnitude
// terms accurate to a few ulp independent of summation length.
struct compensated_sum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

inline long long gcd_ll(long long a, long long b) {
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

} // namespace szk
