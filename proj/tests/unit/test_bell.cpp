#include "doctest.h"
#include "oracles.hpp"

#include "isoperiodic/bell.hpp"
#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <cmath>
#include <random>

using namespace isoperiodic;

namespace
{

// Central finite-difference approximation of the l-th derivative.
Complex nth_difference(const std::function<Complex(Complex)> &f, Complex y, int l, double h)
{
    Complex acc{};
    double binom = 1.0;
    for (int j = 0; j <= l; ++j) {
        acc += (j % 2 == 0 ? 1.0 : -1.0) * binom * f(y + (0.5 * l - j) * h);
        binom = binom * (l - j) / (j + 1);
    }
    return acc / std::pow(h, l);
}

} // namespace

TEST_CASE("sigma_vector")
{
    const SigmaVector s = sigma_vector(2.0, -1.0, 3);
    CHECK(std::abs(s[1] - 11.0 / 6.0) < 1e-15);
    CHECK(std::abs(s[2] - 49.0 / 36.0) < 1e-15);
    const double h = 1e-4;
    const Complex y{0.3, 0.8};
    const Complex d = (sigma_vector(0.4, y + h, 2)[1] - sigma_vector(0.4, y - h, 2)[1]) / (2.0 * h);
    CHECK(std::abs(d - sigma_vector(0.4, y, 2)[2]) < 1e-6);
    CHECK_THROWS_AS(sigma_vector(0.4, 1.0, 2), PoleAtRamification);
}

TEST_CASE("recursive Bell table")
{
    const BellTable t = bell_table_recursive(sigma_vector(2.0, -1.0, 4), 4);
    CHECK(t[0] == Complex{1.0});
    CHECK(std::abs(t[1] - 11.0 / 12.0) < 1e-15);
    CHECK(std::abs(t[2] - 73.0 / 48.0) < 1e-14);
    const BellTable z = bell_table_recursive(sigma_from_values({0.0, 0.0, 0.0, 0.0}), 4);
    for (int l = 1; l <= 4; ++l) {
        CHECK(z[l] == Complex{0.0});
    }
}

TEST_CASE("explicit partition sum")
{
    const SigmaVector s = sigma_from_values({0.0, 0.0, 0.0});
    CHECK(bell_explicit(0, s) == Complex{1.0});
    CHECK(bell_explicit(3, s) == Complex{0.0});
    CHECK_THROWS_AS(bell_explicit(13, sigma_from_values(std::vector<Complex>(13, 1.0))),
                    PartitionBoundExceeded);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> raw;
        for (int k = 0; k < 12; ++k) {
            raw.push_back(oracles::random_complex(rng, -2.0, 2.0));
        }
        const SigmaVector sv = sigma_from_values(raw);
        const BellTable t = bell_table_recursive(sv, 12);
        for (int l = 0; l <= 12; ++l) {
            const Complex e = bell_explicit(l, sv);
            CHECK(std::abs(e - t[l]) <= 1e-12 * std::max(1.0, std::abs(t[l])));
        }
    }
}

TEST_CASE("ratio_derivative")
{
    const BellTable t = bell_table(2.0, -1.0, 3);
    CHECK(std::abs(ratio_derivative(0, 2.0, -1.0, t) - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(ratio_derivative(1, 2.0, -1.0, t) - 15.0 / 36.0) < 1e-15);
    CHECK_THROWS_AS(ratio_derivative(0, 2.0, 2.0, t), PoleCollision);

    // omega(Q0) = 1 / (I0 v): I0 does not depend on y0.
    const Complex x{0.45, 0.1};
    const CurveFamilyPoint p(x);
    const PeriodData periods = compute_periods(p, make_cycle_basis(p.region));
    const Complex y{1.8, 0.4};
    auto omega = [&](Complex yy) { return eval_omega(p, periods, SheetedPoint{yy, 1}).omega_Q0; };
    const BellTable L = bell_table(x, y, 4);
    for (int n = 0; n <= 4; ++n) {
        const Complex fd = nth_difference([&](Complex yy) { return omega(yy) / (x - yy); }, y, n,
                                          n <= 2 ? 1e-3 : 1e-2)
                           / omega(y);
        const Complex exact = ratio_derivative(n, x, y, L);
        CHECK(std::abs(fd - exact) < 1e-3 * std::abs(exact));
    }
}

TEST_CASE("derivative identities converge at second order")
{
    const Complex x{0.45, 0.1};
    const Complex y{1.8, 0.4};
    const double h = 1e-2;

    for (int n = 1; n <= 4; ++n) {
        // dL_n/dy0 = L_{n+1} - L_n L_1.
        const BellTable L = bell_table(x, y, n + 1);
        const Complex target = L[n + 1] - L[n] * L[1];
        auto Ln_y = [&](double t) { return Complex{bell_table(x, y + t, n)[n]}; };
        const auto d = central_difference(Ln_y, 0.0, h);
        const double order = observed_order(std::abs(d.coarse - target), std::abs(d.fine - target));
        INFO("Ly0 n=", n, " order=", order);
        CHECK(std::abs(order - 2.0) < 0.2);

        // dL_n/dx at fixed y0 = -n / (2 (x - y0)) D_{n-1}.
        const Complex tx = -static_cast<double>(n) / (2.0 * (x - y)) * ratio_derivative(n - 1, x, y, L);
        auto Ln_x = [&](double t) { return Complex{bell_table(x + t, y, n)[n]}; };
        const auto e = central_difference(Ln_x, 0.0, h);
        const double ox = observed_order(std::abs(e.coarse - tx), std::abs(e.fine - tx));
        INFO("Lx n=", n, " order=", ox);
        CHECK(std::abs(ox - 2.0) < 0.2);
    }

    // d^l omega(Q0)/dy0^l = omega(Q0) L_l for l <= 3.
    const CurveFamilyPoint p(x);
    const PeriodData periods = compute_periods(p, make_cycle_basis(p.region));
    auto omega = [&](Complex yy) { return eval_omega(p, periods, SheetedPoint{yy, 1}).omega_Q0; };
    const BellTable L = bell_table(x, y, 3);
    for (int l = 1; l <= 3; ++l) {
        const Complex target = omega(y) * L[l];
        const double hl = 2e-2;
        const double ec = std::abs(nth_difference(omega, y, l, hl) - target);
        const double ef = std::abs(nth_difference(omega, y, l, 0.5 * hl) - target);
        INFO("omega l=", l, " order=", observed_order(ec, ef));
        CHECK(std::abs(observed_order(ec, ef) - 2.0) < 0.2);
    }
}
