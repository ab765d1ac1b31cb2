#include "doctest.h"
#include "oracles.hpp"

#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <cmath>
#include <random>

using namespace isoperiodic;

namespace
{

struct Setup {
    CurveFamilyPoint point;
    CycleBasis cycles;
    PeriodData periods;
};

Setup at(Complex x, const Region &region)
{
    CurveFamilyPoint p(x, region);
    CycleBasis c = make_cycle_basis(region);
    PeriodData d = compute_periods(p, c);
    return {p, c, d};
}

Setup at(Complex x) { return at(x, Region::around(x)); }

PathSpec circle(Complex centre, double r, int n = 48)
{
    PathSpec p;
    p.closed = true;
    for (int k = 0; k < n; ++k) {
        p.vertices.push_back(centre + std::polar(r, 2.0 * pi * k / n));
    }
    return p;
}

} // namespace

TEST_CASE("region and family point validation")
{
    CHECK_THROWS_AS(Region::disk(0.1, 0.2).validate(), DegenerateCurve);
    CHECK_THROWS_AS(Region::disk(0.5, -1.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(CurveFamilyPoint(1.0), DegenerateCurve);
    CHECK_THROWS_AS(CurveFamilyPoint(0.9, Region::disk(0.5, 0.1)), InvalidArgument);
    const Region seg = Region::segment(0.4, 0.6, 0.05);
    CHECK(seg.contains(0.5));
    CHECK(seg.contains(Complex{0.45, 0.05}));
    CHECK_FALSE(seg.contains(0.7));
}

TEST_CASE("cycle basis encloses the right branch points")
{
    for (const Region &r : {Region::around(0.5), Region::segment(0.4, 0.6, 0.05),
                            Region::around(Complex{0.3, 0.4}), Region::around(Complex{0.5, -2.0})}) {
        const CycleBasis c = make_cycle_basis(r);
        CHECK(winding_number(c.a_loop, 0.0) != 0);
        CHECK(winding_number(c.a_loop, r.start) != 0);
        CHECK(winding_number(c.a_loop, r.end) != 0);
        CHECK(winding_number(c.a_loop, 1.0) == 0);
        CHECK(winding_number(c.b_loop, 1.0) != 0);
        CHECK(winding_number(c.b_loop, r.centre()) != 0);
        CHECK(winding_number(c.b_loop, 0.0) == 0);
        CHECK(c.clearance > 0.0);
    }
    CHECK_THROWS_AS(make_cycle_basis(Region::around(2.0)), InvalidGeometry);
}

TEST_CASE("square-root continuation")
{
    const Complex x{0.5, 0.0};
    const PathSpec around_zero_and_x = circle(0.25, 0.45);
    const Complex u0 = around_zero_and_x.vertices.front();
    const Complex v0 = std::sqrt(curve_polynomial(u0, x));
    const LiftedPath even = lift_sqrt_along_path(x, around_zero_and_x, v0);
    CHECK(std::abs(even.end_value() - v0) < 1e-10 * std::abs(v0));

    const PathSpec around_zero = circle(0.0, 0.2);
    const Complex w0 = std::sqrt(curve_polynomial(around_zero.vertices.front(), x));
    const LiftedPath odd = lift_sqrt_along_path(x, around_zero, w0);
    CHECK(std::abs(odd.end_value() + w0) < 1e-10 * std::abs(w0));

    const PathSpec tiny{{Complex{2.0, 0.1}, Complex{2.0, 0.1 + 1e-9}, Complex{2.0, 0.1 + 2e-9}},
                        false, 1};
    const Complex t0 = std::sqrt(curve_polynomial(tiny.vertices.front(), x));
    CHECK(std::abs(lift_sqrt_along_path(x, tiny, t0).end_value() - t0) < 1e-8 * std::abs(t0));

    CHECK_THROWS_AS(lift_sqrt_along_path(x, circle(0.0, 0.5), std::sqrt(curve_polynomial(0.5, x))),
                    BranchPointCollision);
    CHECK_THROWS_AS(lift_sqrt_along_path(x, around_zero, 2.0 * w0), InvalidArgument);
}

TEST_CASE("periods against the AGM oracle")
{
    for (double x : {0.3, 0.5, 0.7}) {
        const Setup s = at(x);
        CHECK(std::abs(s.periods.tau - oracles::legendre_tau(x)) < 1e-9);
        CHECK(s.periods.tau.imag() > 0.0);
        CHECK(s.periods.normalization_error < 1e-9);
    }
    const Setup h = at(0.5);
    CHECK(std::abs(h.periods.tau - Complex{0, 1}) < 1e-9);
    CHECK(std::abs(std::abs(h.periods.I0) - 4.0 * oracles::ellipk_modulus(std::sqrt(0.5))) < 1e-8);
}

TEST_CASE("periods are invariant under loop refinement and deformation")
{
    const Complex x{0.45, 0.1};
    const Region region = Region::around(x);
    const Setup s = at(x, region);
    CycleBasis fine = s.cycles;
    fine.a_loop = fine.a_loop.refined(3);
    fine.b_loop = fine.b_loop.refined(3);
    const PeriodData r = compute_periods(s.point, fine);
    CHECK(std::abs(r.I0 - s.periods.I0) < 1e-9 * std::abs(s.periods.I0));
    CHECK(std::abs(r.tau - s.periods.tau) < 1e-9);

    // A slightly smaller region yields homotopic loops.
    const Region smaller = Region::disk(x, 0.8 * region.radius);
    const Setup d = at(x, smaller);
    CHECK(std::abs(d.periods.tau - s.periods.tau) < 1e-9);
    CHECK(std::abs(std::abs(d.periods.I0) - std::abs(s.periods.I0)) < 1e-9 * std::abs(s.periods.I0));
}

TEST_CASE("evaluations of omega")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Complex x = Complex{0.5, 0.0} + oracles::random_complex(rng, -0.3, 0.3);
        const Setup s = at(x);
        const auto e = eval_omega(s.point, s.periods, SheetedPoint{Complex{2.0, 0.5}, 1});
        const double scale = std::norm(e.omega_P0) + std::norm(e.omega_P1) + std::norm(e.omega_Px);
        CHECK(std::abs(e.omega_P0 * e.omega_P0 + e.omega_P1 * e.omega_P1 + e.omega_Px * e.omega_Px)
              < 1e-12 * scale);
    }
    const Setup h = at(0.5);
    const auto e = eval_omega(h.point, h.periods, SheetedPoint{2.0, 1});
    CHECK(std::abs(e.v_Q0 - std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(e.omega_Q0) == doctest::Approx(1.0 / (7.416298709205487 * std::sqrt(3.0))).epsilon(1e-9));
    CHECK(std::abs(e.omega_P0) == doctest::Approx(std::abs(e.omega_P1)).epsilon(1e-14));
    const auto f = eval_omega(h.point, h.periods, SheetedPoint{2.0, -1});
    CHECK(f.omega_Q0 == -e.omega_Q0);
    CHECK_THROWS_AS(eval_omega(h.point, h.periods, SheetedPoint{0.5, 1}), PoleAtRamification);
    CHECK_THROWS_AS(eval_omega(h.point, h.periods, SheetedPoint{2.0, 0}), InvalidArgument);
}

TEST_CASE("second-kind constants and their relations")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5; ++i) {
        const Complex x = Complex{0.5, 0.0} + oracles::random_complex(rng, -0.3, 0.3);
        const Setup s = at(x);
        const SecondKindConstants k = compute_Ix(s.point, s.cycles, s.periods);
        CHECK(std::abs(k.at_x - s.periods.Ix) < 1e-12 * std::abs(k.at_x));
        CHECK(check_normalization_relations(s.point, s.periods, k).max() < 1e-10);
    }
    const Setup h = at(0.5);
    CycleBasis fine = h.cycles;
    fine.a_loop = fine.a_loop.refined(2);
    const PeriodData r = compute_periods(h.point, fine);
    CHECK(std::abs(r.Ix - h.periods.Ix) < 1e-10 * std::abs(h.periods.Ix));
}

TEST_CASE("W(Q0, Px)")
{
    const Setup h = at(0.5);
    const SheetedPoint q{2.0, 1};
    const Complex w = eval_W_Q0_Px(h.point, h.periods, h.periods.Ix, q);
    CHECK(eval_W_Q0_Px(h.point, h.periods, h.periods.Ix, q.flipped()) == -w);

    CycleBasis fine = h.cycles;
    fine.a_loop = fine.a_loop.refined(2);
    const PeriodData r = compute_periods(h.point, fine, QuadratureSpec{1e-13, 1e-15, 4000});
    CHECK(std::abs(eval_W_Q0_Px(h.point, r, r.Ix, q) - w) < 1e-10 * std::abs(w));

    // Leading pole coefficient as y0 -> x along a ray, Richardson-extrapolated.
    const Complex dir = std::polar(1.0, 0.7);
    auto scaled = [&](double eps) {
        const SheetedPoint p{0.5 + eps * dir, 1};
        const Complex e = eps * dir;
        const auto ev = eval_omega(h.point, h.periods, p);
        return eval_W_Q0_Px(h.point, h.periods, h.periods.Ix, p) * e / (ev.omega_Q0 / ev.omega_Px);
    };
    const Complex limit = (10.0 * scaled(1e-3) - scaled(1e-2)) / 9.0;
    CHECK(std::abs(limit - 1.0) < 1e-4);
    CHECK_THROWS_AS(eval_W_Q0_Px(h.point, h.periods, h.periods.Ix, SheetedPoint{0.5 + 1e-9, 1}),
                    PoleCollision);
}

TEST_CASE("Rauch variational formulas")
{
    for (Complex x : {Complex{0.5, 0.0}, Complex{0.4, 0.0}, Complex{0.45, 0.1}}) {
        const CurveFamilyPoint p(x);
        const CycleBasis c = make_cycle_basis(p.region);
        const RauchReport rep = rauch_check(p, c, SheetedPoint{Complex{2.0, 0.3}, 1}, 1e-4);
        for (const auto &e : rep.entries) {
            INFO(e.name, " x=", x.real(), " rel=", e.relative, " ratio=", e.ratio);
            CHECK(e.relative < 1e-6);
            CHECK(std::abs(e.ratio - 4.0) < 0.5);
        }
    }
}
