#ifndef ISOPERIODIC_TESTS_ORACLES_HPP
#define ISOPERIODIC_TESTS_ORACLES_HPP

// Independent reference values used by the unit and acceptance tests. None of
// these share code with the library.

#include <cmath>
#include <complex>
#include <random>

namespace oracles
{

using Complex = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

// Complete elliptic integral of the first kind K(k) = pi / (2 AGM(1, k')).
inline double ellipk_modulus(double k)
{
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 60 && std::abs(a - b) > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (2.0 * a);
}

// Legendre period ratio for the curve v^2 = u(u-1)(u-x), 0 < x < 1.
inline Complex legendre_tau(double x)
{
    return Complex{0.0, ellipk_modulus(std::sqrt(1.0 - x)) / ellipk_modulus(std::sqrt(x))};
}

// theta(0 | i) = pi^(1/4) / Gamma(3/4).
inline double theta_zero_at_i() { return std::pow(pi, 0.25) / std::tgamma(0.75); }

struct PoleSums {
    Complex s1, s2, s3;
};

inline PoleSums pole_sums(Complex x, Complex y)
{
    PoleSums s;
    s.s1 = 1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x);
    s.s2 = 1.0 / (y * y) + 1.0 / ((y - 1.0) * (y - 1.0)) + 1.0 / ((y - x) * (y - x));
    s.s3 = 1.0 / (y * y * y) + 1.0 / ((y - 1.0) * (y - 1.0) * (y - 1.0))
           + 1.0 / ((y - x) * (y - x) * (y - x));
    return s;
}

// Closed-form second-order equation for the simple-pole case (n = 0).
inline Complex ode_closed_form_n0(Complex x, Complex y, Complex yp)
{
    const PoleSums s = pole_sums(x, y);
    const Complex drift = 1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x);
    const Complex tail = 2.0 / (x * (y - x)) + 2.0 / ((x - 1.0) * (y - x)) + 1.0 / (x - 1.0)
                         - 1.0 / x + 3.0 / ((y - x) * (y - x));
    return 0.5 * yp * yp * s.s1 + yp * yp * s.s2 / s.s1 - yp * drift
           - 2.0 * yp / (s.s1 * (y - x) * (y - x)) + tail / (2.0 * s.s1);
}

// Closed-form second-order equation for n = 1. `as_printed` reproduces the
// published version, whose cubic sum repeats 1/(y-1)^3 and whose linear term
// carries -1 in place of -5; the default is the corrected form that agrees
// with the general equation.
inline Complex ode_closed_form_n1(Complex x, Complex y, Complex yp, bool as_printed = false)
{
    const PoleSums s = pole_sums(x, y);
    const Complex s3 = as_printed ? 1.0 / (y * y * y) + 2.0 / ((y - 1.0) * (y - 1.0) * (y - 1.0))
                                  : s.s3;
    const double shift = as_printed ? 1.0 : 5.0;
    const Complex yx = y - x;
    const Complex sx = 1.0 / x + 1.0 / (x - 1.0);
    const Complex bracket =
        2.0 * yp * yp * (s.s1 * s.s2 + 2.0 * s3)
        + 4.0 * yp / (yx * yx * yx) * (x / y + (x - 1.0) / (y - 1.0) - shift)
        + 2.0 / (yx * yx) * (sx + 3.0 / yx)
        + 0.5 * s.s1 * (2.0 / yx * sx + 3.0 / (yx * yx) + 1.0 / (x - 1.0) - 1.0 / x);
    return 0.5 * yp * yp * s.s1 - yp * (sx + 1.0 / yx) + bracket / (s.s1 * s.s1 + 2.0 * s.s2);
}

inline Complex random_complex(std::mt19937_64 &rng, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    const double re = d(rng);
    return Complex{re, d(rng)};
}

} // namespace oracles

#endif
