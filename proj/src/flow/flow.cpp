#include "isoperiodic/flow.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace isoperiodic
{

namespace
{

constexpr double singular_ratio = 1e-10;
constexpr double degenerate_ratio = 1e-12;
constexpr double branch_point_margin = 1e-6;

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

// |L_{n+1}| relative to |L_n| / |x - y0|, the size the other terms of the
// slope carry.
double bell_ratio(const BellTable &L, int n, Complex x, Complex y0)
{
    const double scale = std::abs(L[n]) / std::abs(x - y0);
    return std::abs(L[n + 1]) / std::max(scale, std::numeric_limits<double>::min());
}

void guard_branch_points(Complex x, Complex y0)
{
    if (std::abs(y0) < branch_point_margin || std::abs(y0 - 1.0) < branch_point_margin
        || std::abs(y0 - x) < branch_point_margin) {
        throw RegionExit("flow: y0 reached the neighbourhood of a branch point");
    }
}

// Runs the solver and surfaces the flow-specific halting conditions raised
// inside the right-hand side with their location attached.
Trajectory solve_flow(const RhsFunction &rhs, const State &y0, const FlowConfig &config,
                      const std::vector<double> &times)
{
    try {
        return solve_ivp(rhs, 0.0, y0, 1.0, config.ivp, times);
    } catch (const RhsEvaluationError &e) {
        const Complex x = config.x0 + e.location() * (config.x1 - config.x0);
        const std::string where = " (halted at x = " + std::to_string(x.real()) + " + "
                                  + std::to_string(x.imag()) + "i)";
        try {
            std::rethrow_if_nested(e);
        } catch (const RegionExit &inner) {
            throw RegionExit(inner.what() + where);
        } catch (const BellSingularity &inner) {
            throw BellSingularity(inner.what() + where);
        } catch (const DegenerateDeformation &inner) {
            throw DegenerateDeformation(inner.what() + where);
        } catch (...) {
        }
        throw;
    }
}

Complex curve_dv(Complex y, Complex x, Complex v, Complex yp)
{
    const Complex P_y = 3.0 * y * y - 2.0 * (1.0 + x) * y + x;
    const Complex P_x = -y * (y - 1.0);
    return (P_y * yp + P_x) / (2.0 * v);
}

struct Sampled {
    std::vector<FlowState> states;
    FlowDiagnostics diagnostics;
};

} // namespace

std::string to_string(FlowMode mode)
{
    switch (mode) {
    case FlowMode::first_order:
        return "first_order";
    case FlowMode::second_order:
        return "second_order";
    case FlowMode::both:
        return "both";
    }
    return "first_order";
}

FlowMode flow_mode_from_string(const std::string &name)
{
    if (name == "first_order" || name == "first") {
        return FlowMode::first_order;
    }
    if (name == "second_order" || name == "second") {
        return FlowMode::second_order;
    }
    if (name == "both") {
        return FlowMode::both;
    }
    throw InvalidArgument("unknown flow mode '" + name + "'");
}

void FlowConfig::validate(const Region &region) const
{
    if (n < 0 || n > max_pole_parameter) {
        throw InvalidArgument("FlowConfig: n must lie in [0, 8]");
    }
    if (samples < 2) {
        throw InvalidArgument("FlowConfig: at least two samples are required");
    }
    if (!region.contains(x0) || !region.contains(x1)) {
        throw InvalidArgument("FlowConfig: the x path must lie inside the cycle region");
    }
    ivp.validate();
    quad.validate();
    q0.validate(x0);
}

Complex b_period(const CurveFamilyPoint &point, const SheetedPoint &q0, int n, Complex A,
                 const PeriodData &periods)
{
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const BellTable L = bell_table(point.x, q0.y0, n);
    return 2.0 * pi * I_unit / factorial(n + 1) * e.omega_Q0 * L[n] + A * periods.tau;
}

Complex initial_slope(const CurveFamilyPoint &point, const SheetedPoint &q0, int n, Complex A,
                      const PeriodData &periods, Complex Ix)
{
    const Complex x = point.x;
    const Complex y = q0.y0;
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const BellTable L = bell_table(x, y, n + 1);
    if (bell_ratio(L, n, x, y) < degenerate_ratio) {
        throw DegenerateDeformation("initial_slope: L_{n+1} vanishes, the isoperiodic slope is "
                                    "undefined");
    }
    const Complex W = eval_W_Q0_Px(point, periods, Ix, q0);
    Complex bracket = e.omega_Px * W * L[n];
    if (n > 0) {
        bracket -= static_cast<double>(n) / (x - y) * e.omega_Q0 * ratio_derivative(n - 1, x, y, L);
    }
    bracket += A * factorial(n + 1) * e.omega_Px * e.omega_Px;
    return -bracket / (2.0 * L[n + 1] * e.omega_Q0);
}

Complex ode_rhs(int n, const FlowState &state)
{
    if (n < 0 || n > max_pole_parameter) {
        throw InvalidArgument("ode_rhs: n must lie in [0, 8]");
    }
    const Complex x = state.x;
    const Complex y = state.y0;
    const Complex yp = state.y0p;
    if (std::abs(y - x) < 1e-8) {
        throw PoleCollision("ode_rhs: y0 collides with x");
    }
    const BellTable L = bell_table(x, y, n + 2);
    if (bell_ratio(L, n, x, y) < singular_ratio) {
        throw BellSingularity("ode_rhs: L_{n+1} is negligible");
    }

    const Complex d = x - y;
    const Complex sx = 1.0 / x + 1.0 / (x - 1.0);
    const Complex Ln1 = L[n + 1];

    // Partial Taylor sums T_s = sum_{k<s} L_k d^k / k!.
    std::vector<Complex> T(static_cast<std::size_t>(n) + 2, Complex{});
    Complex term = 1.0;
    for (int s = 0; s <= n; ++s) {
        T[s + 1] = T[s] + L[s] * term;
        term *= d / static_cast<double>(s + 1);
    }
    Complex weighted{}; // sum_{s<n} (n - s) L_s d^s / s!
    Complex nested{};   // sum_{s=1}^{n-1} T_s
    for (int s = 0; s < n; ++s) {
        weighted += static_cast<double>(n - s) * (T[s + 1] - T[s]);
        if (s >= 1) {
            nested += T[s];
        }
    }

    const Complex dn1 = std::pow(d, n + 1);
    const Complex dn2 = dn1 * d;
    const double nf = factorial(n);

    Complex r = -yp * yp * L[n + 2] / Ln1 - yp * (sx + 1.0 / (y - x));
    r += yp * factorial(n + 1) / (dn2 * Ln1) * T[n + 1];
    r += nf * (sx + 2.0 / (y - x)) / (2.0 * dn1 * Ln1) * T[n];
    r -= nf / (2.0 * dn2 * Ln1) * weighted;
    r -= nf / (4.0 * dn2 * Ln1) * nested;
    r -= L[n] / (4.0 * Ln1)
         * (2.0 / (y - x) * sx + 3.0 / ((y - x) * (y - x)) + 1.0 / (x - 1.0) - 1.0 / x);
    return r;
}

namespace
{

std::vector<double> sample_times(int count)
{
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        t[k] = static_cast<double>(k) / (count - 1);
    }
    t.back() = 1.0;
    return t;
}

FlowDiagnostics diagnostics_of(const Trajectory &tr)
{
    return FlowDiagnostics{tr.accepted_steps, tr.rejected_steps, tr.rhs_evaluations};
}

Sampled run_first_order(const FlowConfig &config, const CycleBasis &cycles)
{
    const Complex dx = config.x1 - config.x0;
    const RhsFunction rhs = [&](double t, const State &s) {
        const Complex x = config.x0 + t * dx;
        guard_branch_points(x, s[0]);
        const CurveFamilyPoint point(x, cycles.region);
        const PeriodData periods =
            compute_periods(point, cycles, config.quad, PeriodOptions{false, false});
        const SheetedPoint q{s[0], 1};
        const BellTable L = bell_table(x, s[0], config.n + 1);
        if (bell_ratio(L, config.n, x, s[0]) < singular_ratio) {
            throw BellSingularity("flow: L_{n+1} is negligible along the trajectory");
        }
        const Complex slope = initial_slope(point, q, config.n, config.A, periods, periods.Ix);
        return State{dx * slope, dx * curve_dv(s[0], x, s[1], slope)};
    };
    const auto times = sample_times(config.samples);
    const Trajectory tr = solve_flow(rhs, State{config.q0.y0, config.q0.v(config.x0)}, config,
                                     times);
    Sampled out;
    out.diagnostics = diagnostics_of(tr);
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const Complex x = config.x0 + tr.t[k] * dx;
        const SheetedPoint q = SheetedPoint::nearest(tr.y[k][0], x, tr.y[k][1]);
        out.states.push_back(FlowState{x, q.y0, Complex{}, q.sheet});
    }
    return out;
}

Sampled run_second_order(const FlowConfig &config, const CycleBasis &cycles)
{
    const Complex dx = config.x1 - config.x0;
    const CurveFamilyPoint start(config.x0, cycles.region);
    const PeriodData periods0 = compute_periods(start, cycles, config.quad);
    const Complex p0 = initial_slope(start, config.q0, config.n, config.A, periods0, periods0.Ix)
                       + config.initial_slope_offset;

    const RhsFunction rhs = [&](double t, const State &s) {
        const Complex x = config.x0 + t * dx;
        guard_branch_points(x, s[0]);
        const Complex ypp = ode_rhs(config.n, FlowState{x, s[0], s[1], 1});
        return State{dx * s[1], dx * ypp, dx * curve_dv(s[0], x, s[2], s[1])};
    };
    const auto times = sample_times(config.samples);
    const Trajectory tr =
        solve_flow(rhs, State{config.q0.y0, p0, config.q0.v(config.x0)}, config, times);
    Sampled out;
    out.diagnostics = diagnostics_of(tr);
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const Complex x = config.x0 + tr.t[k] * dx;
        const SheetedPoint q = SheetedPoint::nearest(tr.y[k][0], x, tr.y[k][2]);
        out.states.push_back(FlowState{x, q.y0, tr.y[k][1], q.sheet});
    }
    return out;
}

} // namespace

FlowResult integrate_flow(const FlowConfig &config, const CycleBasis &cycles)
{
    config.validate(cycles.region);
    FlowResult result;
    result.mode = config.mode;
    result.mode_gap = std::numeric_limits<double>::quiet_NaN();

    if (config.mode == FlowMode::second_order) {
        Sampled s = run_second_order(config, cycles);
        result.samples = std::move(s.states);
        result.diagnostics = s.diagnostics;
    } else {
        Sampled s = run_first_order(config, cycles);
        result.samples = std::move(s.states);
        result.diagnostics = s.diagnostics;
        if (config.mode == FlowMode::both) {
            Sampled second = run_second_order(config, cycles);
            result.mode_gap = 0.0;
            for (std::size_t k = 0; k < result.samples.size(); ++k) {
                result.mode_gap = std::max(result.mode_gap, std::abs(result.samples[k].y0
                                                                     - second.states[k].y0));
            }
            result.second_order_samples = std::move(second.states);
            result.second_order_diagnostics = second.diagnostics;
        }
    }

    const bool fill_slope = config.mode != FlowMode::second_order;
    for (auto &state : result.samples) {
        const CurveFamilyPoint point(state.x, cycles.region);
        const PeriodData periods = compute_periods(point, cycles, config.quad);
        const SheetedPoint q{state.y0, state.sheet};
        if (fill_slope) {
            state.y0p = initial_slope(point, q, config.n, config.A, periods, periods.Ix);
        }
        result.B_values.push_back(b_period(point, q, config.n, config.A, periods));
    }
    result.B0 = result.B_values.front();
    for (const Complex &B : result.B_values) {
        result.max_B_drift = std::max(result.max_B_drift, std::abs(B - result.B0));
    }
    return result;
}

IsoperiodicityReport verify_isoperiodic(const std::vector<FlowState> &samples,
                                        const FlowConfig &config, const CycleBasis &cycles,
                                        double tol)
{
    IsoperiodicityReport report;
    if (samples.empty()) {
        throw InvalidArgument("verify_isoperiodic: no samples");
    }
    for (const FlowState &s : samples) {
        const CurveFamilyPoint point(s.x, cycles.region);
        const PeriodData periods = compute_periods(point, cycles, config.quad);
        const SheetedPoint q{s.y0, s.sheet};
        report.B_values.push_back(b_period(point, q, config.n, config.A, periods));
        const Complex slope = initial_slope(point, q, config.n, config.A, periods, periods.Ix);
        report.max_slope_residual = std::max(report.max_slope_residual,
                                             std::abs(s.y0p - slope) / std::max(1.0, std::abs(slope)));
    }
    const Complex B0 = report.B_values.front();
    for (const Complex &B : report.B_values) {
        report.max_B_drift = std::max(report.max_B_drift, std::abs(B - B0) / std::abs(B0));
    }
    report.passed = report.max_B_drift <= tol && report.max_slope_residual <= tol;
    return report;
}

} // namespace isoperiodic
