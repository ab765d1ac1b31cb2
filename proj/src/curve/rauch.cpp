#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <array>
#include <cmath>

namespace isoperiodic
{

namespace
{

struct Snapshot {
    Complex tau;
    Complex omega_Q0;
    Complex omega_Px;
    Complex W;
};

Snapshot snapshot(const CurveFamilyPoint &point, const CycleBasis &cycles, const SheetedPoint &q0,
                  const QuadratureSpec &spec)
{
    const PeriodData periods = compute_periods(point, cycles, spec, PeriodOptions{true, false});
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    return Snapshot{periods.tau, e.omega_Q0, e.omega_Px,
                    eval_W_Q0_Px(point, periods, periods.Ix, q0)};
}

} // namespace

RauchReport rauch_check(const CurveFamilyPoint &point, const CycleBasis &cycles,
                        const SheetedPoint &q0, double h, const QuadratureSpec &spec)
{
    if (!(h > 0.0)) {
        throw InvalidArgument("rauch_check: step must be positive");
    }
    q0.validate(point.x);
    for (double s : {-h, h}) {
        if (!cycles.region.contains(point.x + s)) {
            throw InvalidArgument("rauch_check: x +- h leaves the region of the cycle basis");
        }
    }

    const PeriodData periods = compute_periods(point, cycles, spec);
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const Complex x = point.x;
    const Complex W = eval_W_Q0_Px(point, periods, periods.Ix, q0);

    const std::array<Complex, 4> predicted{
        pi * I_unit * e.omega_Px * e.omega_Px,
        0.5 * e.omega_Px * W,
        0.5 * e.omega_Px * (periods.Ix * e.omega_Px - 1.0 / x - 1.0 / (x - 1.0)),
        dW_Q0_Px_dx(point, periods, q0, Complex{0.0, 0.0}),
    };

    auto difference = [&](double step) {
        const Snapshot plus = snapshot(point.moved_to(x + step), cycles, q0, spec);
        const Snapshot minus = snapshot(point.moved_to(x - step), cycles, q0, spec);
        const double inv = 1.0 / (2.0 * step);
        return std::array<Complex, 4>{(plus.tau - minus.tau) * inv,
                                      (plus.omega_Q0 - minus.omega_Q0) * inv,
                                      (plus.omega_Px - minus.omega_Px) * inv,
                                      (plus.W - minus.W) * inv};
    };
    const auto coarse = difference(h);
    const auto fine = difference(0.5 * h);

    static constexpr std::array<const char *, 4> names{"tau", "omega_Q0", "omega_Px", "W_Q0_Px"};
    RauchReport report;
    report.h = h;
    for (std::size_t i = 0; i < 4; ++i) {
        RauchResidual &r = report.entries[i];
        r.name = names[i];
        r.predicted = predicted[i];
        r.difference_h = coarse[i];
        r.difference_half = fine[i];
        r.residual_h = std::abs(coarse[i] - predicted[i]);
        r.residual_half = std::abs(fine[i] - predicted[i]);
        r.relative = r.residual_h / std::abs(predicted[i]);
        r.ratio = r.residual_h / r.residual_half;
    }
    return report;
}

} // namespace isoperiodic
