#include "doctest.h"
#include "oracles.hpp"

#include "isoperiodic/errors.hpp"
#include "isoperiodic/flow.hpp"

#include <cmath>
#include <random>

using namespace isoperiodic;

namespace
{

struct Fixture {
    Region region = Region::around(0.5);
    CycleBasis cycles = make_cycle_basis(region);
    CurveFamilyPoint point{0.5, region};
    PeriodData periods = compute_periods(point, cycles);
};

FlowState random_state(std::mt19937_64 &rng)
{
    const Complex x = Complex{0.5, 0.0} + oracles::random_complex(rng, -0.4, 0.4);
    const Complex y = oracles::random_complex(rng, -2.0, 3.0);
    const Complex yp = oracles::random_complex(rng, -2.0, 2.0);
    return FlowState{x, y, yp, 1};
}

} // namespace

TEST_CASE("ode_rhs agrees with the closed forms for n = 0 and n = 1")
{
    std::mt19937_64 rng(2024);
    int printed_mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const FlowState s = random_state(rng);
        const Complex r0 = ode_rhs(0, s);
        const Complex o0 = oracles::ode_closed_form_n0(s.x, s.y0, s.y0p);
        CHECK(std::abs(r0 - o0) < 1e-12 * std::max(1.0, std::abs(o0)));
        const Complex r1 = ode_rhs(1, s);
        const Complex o1 = oracles::ode_closed_form_n1(s.x, s.y0, s.y0p);
        CHECK(std::abs(r1 - o1) < 1e-12 * std::max(1.0, std::abs(o1)));
        const Complex p1 = oracles::ode_closed_form_n1(s.x, s.y0, s.y0p, true);
        printed_mismatches += std::abs(r1 - p1) > 1e-6 * std::max(1.0, std::abs(o1));
    }
    // The published n = 1 expression is not the general equation.
    CHECK(printed_mismatches == 100);
}

TEST_CASE("ode_rhs performs no quadrature and rejects singular points")
{
    const long before = quadrature_call_count();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        (void)ode_rhs(3, random_state(rng));
    }
    CHECK(quadrature_call_count() == before);

    CHECK_THROWS_AS(ode_rhs(0, FlowState{0.5, 0.5, 1.0, 1}), Error);
    const double y_star = (3.0 + std::sqrt(3.0)) / 6.0; // L_1 = 0 at x = 1/2
    CHECK_THROWS_AS(ode_rhs(0, FlowState{0.5, y_star, 1.0, 1}), BellSingularity);
    CHECK_THROWS_AS(ode_rhs(9, FlowState{0.5, 2.0, 1.0, 1}), InvalidArgument);
}

TEST_CASE("b_period")
{
    Fixture f;
    const SheetedPoint q{2.0, 1};
    const auto e = eval_omega(f.point, f.periods, q);
    const Complex two_pi_i = 2.0 * pi * I_unit;
    CHECK(std::abs(b_period(f.point, q, 0, 0.0, f.periods) - two_pi_i * e.omega_Q0) < 1e-15);
    CHECK(std::abs(b_period(f.point, q, 0, 1.0, f.periods) - two_pi_i * e.omega_Q0 - f.periods.tau)
          < 1e-14);
    // L_1 = Sigma_1 / 2 = -13/12 at x = 1/2, y0 = 2.
    const Complex B1 = b_period(f.point, q, 1, 0.0, f.periods);
    const double I0 = 4.0 * oracles::ellipk_modulus(std::sqrt(0.5));
    CHECK(std::abs(std::abs(B1) - pi * 13.0 / 12.0 / (I0 * std::sqrt(3.0))) < 1e-10);
    CHECK(std::abs(B1 - pi * I_unit * e.omega_Q0 * (-13.0 / 12.0)) < 1e-15);
}

TEST_CASE("initial_slope")
{
    Fixture f;
    const SheetedPoint q{2.0, 1};
    const Complex slope = initial_slope(f.point, q, 0, 0.0, f.periods, f.periods.Ix);

    // Example form for n = 0 with Omega(Px) = W(Px, Q0) + A omega(Px).
    const Complex A{0.3, -0.2};
    const auto e = eval_omega(f.point, f.periods, q);
    const Complex W = eval_W_Q0_Px(f.point, f.periods, f.periods.Ix, q);
    const Complex s1 = 1.0 / 2.0 + 1.0 / 1.0 + 1.0 / 1.5;
    const Complex example = e.omega_Px * (W + A * e.omega_Px) / (e.omega_Q0 * s1);
    CHECK(std::abs(initial_slope(f.point, q, 0, A, f.periods, f.periods.Ix) - example)
          < 1e-13 * std::abs(example));

    // Implicit level set B(x + h, y0 + delta) = B0.
    const Complex B0 = b_period(f.point, q, 0, 0.0, f.periods);
    auto shift = [&](double h) {
        const CurveFamilyPoint p = f.point.moved_to(0.5 + h);
        const PeriodData d = compute_periods(p, f.cycles, QuadratureSpec{1e-14, 1e-16, 20000});
        auto g = [&](Complex delta) {
            return b_period(p, SheetedPoint{2.0 + delta, 1}, 0, 0.0, d) - B0;
        };
        Complex a = 0.0, b = h * slope;
        Complex ga = g(a), gb = g(b);
        for (int it = 0; it < 50 && std::abs(gb) > 1e-17; ++it) {
            const Complex c = b - gb * (b - a) / (gb - ga);
            a = b;
            ga = gb;
            b = c;
            gb = g(b);
        }
        return b;
    };
    const double h = 1e-4;
    const Complex fd = (shift(h) - shift(-h)) / (2.0 * h);
    CHECK(std::abs(fd - slope) < 1e-6 * std::abs(slope));

    // Invariant under the sheet flip.
    CHECK(std::abs(initial_slope(f.point, q.flipped(), 0, 0.0, f.periods, f.periods.Ix) - slope)
          < 1e-14 * std::abs(slope));
    for (int n = 1; n <= 3; ++n) {
        const SheetedPoint c{Complex{1.7, 0.4}, 1};
        const Complex a = initial_slope(f.point, c, n, A, f.periods, f.periods.Ix);
        const Complex b = initial_slope(f.point, c.flipped(), n, -A, f.periods, f.periods.Ix);
        // Flipping the sheet flips omega(Q0); the A term is sheet-free, so
        // the matching A changes sign.
        CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    }

    const double y_star = (3.0 + std::sqrt(3.0)) / 6.0;
    CHECK_THROWS_AS(initial_slope(f.point, SheetedPoint{y_star, 1}, 0, 0.0, f.periods, f.periods.Ix),
                    DegenerateDeformation);
}

TEST_CASE("second-order equation is the prolongation of the slope (n = 2)")
{
    const Region region = Region::around(0.5);
    const CycleBasis cycles = make_cycle_basis(region);
    FlowConfig cfg;
    cfg.n = 2;
    cfg.q0 = SheetedPoint{Complex{2.0, 0.3}, 1};
    cfg.ivp = IVPSpec{1e-13, 1e-15, 1e-4, 200000};
    cfg.quad = QuadratureSpec{1e-14, 1e-16, 20000};
    cfg.samples = 3;

    auto error_at = [&](double h) {
        cfg.x0 = 0.5;
        cfg.x1 = 0.5 + h;
        const FlowResult fwd = integrate_flow(cfg, cycles);
        cfg.x1 = 0.5 - h;
        const FlowResult bwd = integrate_flow(cfg, cycles);
        const Complex fd = (fwd.samples.back().y0p - bwd.samples.back().y0p) / (2.0 * h);
        const FlowState mid = fwd.samples.front();
        const Complex exact = ode_rhs(2, mid);
        return std::abs(fd - exact) / std::abs(exact);
    };
    const double coarse = error_at(2e-3);
    const double fine = error_at(1e-3);
    INFO("coarse=", coarse, " fine=", fine);
    CHECK(coarse < 1e-4);
    CHECK(fine < coarse);
}

TEST_CASE("isoperiodic flow, n = 0")
{
    const Region region = Region::segment(0.4, 0.6, 0.05);
    const CycleBasis cycles = make_cycle_basis(region);
    FlowConfig cfg;
    cfg.mode = FlowMode::both;
    const FlowResult r = integrate_flow(cfg, cycles);
    REQUIRE(r.samples.size() == 21);
    CHECK(r.max_B_drift / std::abs(r.B0) < 1e-8);
    CHECK(r.mode_gap < 1e-7);
    CHECK(std::abs(r.samples.back().y0 - r.samples.front().y0) > 1e-4);
    for (const auto &s : r.samples) {
        CHECK(std::abs(s.y0.imag()) < 1e-9);
    }

    const auto ok = verify_isoperiodic(r.samples, cfg, cycles, 1e-7);
    CHECK(ok.passed);

    auto perturbed = r.samples;
    perturbed[10].y0 += 1e-3;
    CHECK_FALSE(verify_isoperiodic(perturbed, cfg, cycles, 1e-7).passed);

    auto frozen = r.samples;
    for (auto &s : frozen) {
        s.y0 = frozen.front().y0;
        s.y0p = 0.0;
    }
    CHECK_FALSE(verify_isoperiodic(frozen, cfg, cycles, 1e-7).passed);
}

TEST_CASE("flow halts near a degenerate point")
{
    const Region region = Region::segment(0.4, 0.6, 0.05);
    const CycleBasis cycles = make_cycle_basis(region);
    FlowConfig cfg;
    cfg.q0 = SheetedPoint{(3.0 + std::sqrt(3.0)) / 6.0, 1};
    cfg.x0 = 0.5;
    CHECK_THROWS_AS(integrate_flow(cfg, cycles), Error);
    cfg.x1 = 0.9;
    CHECK_THROWS_AS(integrate_flow(cfg, cycles), InvalidArgument);
}
