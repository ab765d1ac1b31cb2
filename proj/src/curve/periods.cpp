#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isoperiodic
{

namespace
{

constexpr double closure_tolerance = 1e-10;
constexpr double normalization_tolerance = 1e-9;
constexpr double ramification_guard = 1e-8;

LiftedPath lift_loop(const CurveFamilyPoint &point, const CycleBasis &cycles, const PathSpec &loop,
                     Complex v_start)
{
    LiftedPath lifted(point.x, loop, v_start, 0.5 * cycles.clearance);
    if (std::abs(lifted.end_value() - lifted.start_value())
        > closure_tolerance * std::abs(lifted.start_value())) {
        throw InvalidGeometry("compute_periods: v does not close up along a cycle; the loop "
                              "encloses an odd number of branch points");
    }
    return lifted;
}

Complex loop_integral(const LiftedPath &lifted, Complex x, bool pole_at_x,
                      const QuadratureSpec &spec)
{
    const PathIntegrand f = [&lifted, x, pole_at_x](const PathPoint &p) {
        const Complex v = lifted.value(p);
        return pole_at_x ? 1.0 / (v * (p.u - x)) : 1.0 / v;
    };
    return integrate_path(f, lifted.path(), spec).value;
}

Complex a_integral_with_pole(const CurveFamilyPoint &point, const CycleBasis &cycles, Complex pole,
                             const QuadratureSpec &spec)
{
    const LiftedPath lifted = lift_loop(point, cycles, cycles.a_loop,
                                        cycles.a_start_value(point.x));
    const PathIntegrand f = [&lifted, pole](const PathPoint &p) {
        return 1.0 / (lifted.value(p) * (p.u - pole));
    };
    return integrate_path(f, lifted.path(), spec).value;
}

} // namespace

Complex SheetedPoint::v(Complex x) const
{
    return static_cast<double>(sheet) * std::sqrt(curve_polynomial(y0, x));
}

void SheetedPoint::validate(Complex x) const
{
    if (sheet != 1 && sheet != -1) {
        throw InvalidArgument("SheetedPoint: sheet must be +1 or -1");
    }
    if (!std::isfinite(y0.real()) || !std::isfinite(y0.imag())) {
        throw InvalidArgument("SheetedPoint: y0 must be finite");
    }
    if (std::abs(y0) < ramification_guard || std::abs(y0 - 1.0) < ramification_guard
        || std::abs(y0 - x) < ramification_guard) {
        throw PoleAtRamification("SheetedPoint: y0 coincides with a branch point");
    }
}

SheetedPoint SheetedPoint::nearest(Complex y0, Complex x, Complex reference)
{
    const Complex w = std::sqrt(curve_polynomial(y0, x));
    return SheetedPoint{y0, std::abs(w - reference) <= std::abs(w + reference) ? 1 : -1};
}

BranchRoots branch_roots(const CurveFamilyPoint &point)
{
    const Complex c = point.region.centre();
    const Complex x = point.x;
    BranchRoots r;
    r.sqrt_x = std::sqrt(c) * std::sqrt(x / c);
    r.sqrt_one_minus_x = std::sqrt(1.0 - c) * std::sqrt((1.0 - x) / (1.0 - c));
    r.sqrt_x_x_minus_1 = I_unit * r.sqrt_x * r.sqrt_one_minus_x;
    return r;
}

PeriodData compute_periods(const CurveFamilyPoint &point, const CycleBasis &cycles,
                           const QuadratureSpec &spec, const PeriodOptions &options)
{
    if (!cycles.region.contains(point.x)) {
        throw InvalidArgument("compute_periods: x lies outside the region of the cycle basis");
    }
    PeriodData out;
    const Complex x = point.x;

    const LiftedPath a = lift_loop(point, cycles, cycles.a_loop, cycles.a_start_value(x));
    out.I0 = loop_integral(a, x, false, spec);
    out.a_integral_pole_x = loop_integral(a, x, true, spec);
    out.Ix = -0.5 * branch_roots(point).sqrt_x_x_minus_1 * out.a_integral_pole_x;

    if (options.verify_normalization) {
        const PathSpec fine = cycles.a_loop.refined(2);
        const LiftedPath a_fine = lift_loop(point, cycles, fine, cycles.a_start_value(x));
        const Complex I0_fine = loop_integral(a_fine, x, false, spec);
        out.normalization_error = std::abs(I0_fine / out.I0 - 1.0);
        if (out.normalization_error > normalization_tolerance) {
            throw NonConvergence("compute_periods: a-period of omega differs from 1 on a "
                                 "refined loop",
                                 out.normalization_error);
        }
    }

    if (!options.with_b_period) {
        out.tau = Complex{std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN()};
        return out;
    }
    const LiftedPath b = lift_loop(point, cycles, cycles.b_loop, cycles.b_start_value(x));
    out.tau = loop_integral(b, x, false, spec) / out.I0;
    if (std::abs(out.tau.imag()) < 1e-12 * std::max(1.0, std::abs(out.tau))) {
        throw OrientationError("compute_periods: Im(tau) vanishes in both orientations");
    }
    if (out.tau.imag() < 0.0) {
        out.tau = -out.tau;
        out.b_reversed = true;
    }
    return out;
}

DifferentialEvaluations eval_omega(const CurveFamilyPoint &point, const PeriodData &periods,
                                   const SheetedPoint &q0)
{
    q0.validate(point.x);
    const BranchRoots r = branch_roots(point);
    DifferentialEvaluations e;
    e.omega_P0 = 2.0 / (periods.I0 * r.sqrt_x);
    e.omega_P1 = 2.0 / (periods.I0 * r.sqrt_one_minus_x);
    e.omega_Px = 2.0 / (periods.I0 * r.sqrt_x_x_minus_1);
    e.v_Q0 = q0.v(point.x);
    e.omega_Q0 = 1.0 / (periods.I0 * e.v_Q0);
    return e;
}

SecondKindConstants compute_Ix(const CurveFamilyPoint &point, const CycleBasis &cycles,
                               const PeriodData & /*periods*/, const QuadratureSpec &spec)
{
    const BranchRoots r = branch_roots(point);
    SecondKindConstants k;
    k.at_x = -0.5 * r.sqrt_x_x_minus_1 * a_integral_with_pole(point, cycles, point.x, spec);
    k.at_0 = -0.5 * r.sqrt_x * a_integral_with_pole(point, cycles, 0.0, spec);
    k.at_1 = -0.5 * r.sqrt_one_minus_x * a_integral_with_pole(point, cycles, 1.0, spec);
    return k;
}

double NormalizationRelations::max() const { return std::max({zero_x, one_x, zero_one}); }

NormalizationRelations check_normalization_relations(const CurveFamilyPoint &point,
                                                     const PeriodData &periods,
                                                     const SecondKindConstants &constants)
{
    const Complex x = point.x;
    // I^k / omega(P_k) with omega(P_k) = 2 / (I0 s_k).
    const BranchRoots s = branch_roots(point);
    const Complex r0 = 0.5 * constants.at_0 * periods.I0 * s.sqrt_x;
    const Complex r1 = 0.5 * constants.at_1 * periods.I0 * s.sqrt_one_minus_x;
    const Complex rx = 0.5 * constants.at_x * periods.I0 * s.sqrt_x_x_minus_1;
    const Complex quarter = 0.25 * periods.I0 * periods.I0;
    NormalizationRelations out;
    out.zero_x = std::abs(r0 - rx + x * quarter) / std::abs(x * quarter);
    out.one_x = std::abs(r1 - rx + (x - 1.0) * quarter) / std::abs((x - 1.0) * quarter);
    out.zero_one = std::abs(r0 - r1 + quarter) / std::abs(quarter);
    return out;
}

Complex eval_W_Q0_Px(const CurveFamilyPoint &point, const PeriodData &periods, Complex Ix,
                     const SheetedPoint &q0)
{
    if (std::abs(q0.y0 - point.x) < ramification_guard) {
        throw PoleCollision("eval_W_Q0_Px: y0 collides with x");
    }
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    return (1.0 / (e.omega_Px * (q0.y0 - point.x)) + Ix) * e.omega_Q0;
}

Complex dW_Q0_Px_dx(const CurveFamilyPoint &point, const PeriodData &periods,
                    const SheetedPoint &q0, Complex y0p)
{
    const Complex x = point.x;
    const Complex y = q0.y0;
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const Complex wq = e.omega_Q0;
    const Complex wp = e.omega_Px;
    const Complex Ix = periods.Ix;
    const Complex W = eval_W_Q0_Px(point, periods, Ix, q0);
    const Complex L1 = -0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x));
    const Complex sx = 1.0 / x + 1.0 / (x - 1.0);
    const Complex sy = 1.0 / y + 1.0 / (y - 1.0);

    Complex d = -wq / (2.0 * wp)
                * (1.0 / (y - x) * (sy - sx) + 1.0 / x - 1.0 / (x - 1.0));
    d += 0.5 * Ix * Ix * wq * wp;
    d -= 0.5 * wq * Ix * (sy + sx);
    d += (y0p - 1.0) * (-wq / (wp * (y - x) * (y - x)) + W * L1);
    return d;
}

} // namespace isoperiodic
