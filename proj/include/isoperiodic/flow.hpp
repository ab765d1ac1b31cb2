#ifndef ISOPERIODIC_FLOW_HPP
#define ISOPERIODIC_FLOW_HPP

#include "isoperiodic/bell.hpp"
#include "isoperiodic/curve.hpp"
#include "isoperiodic/numerics.hpp"

#include <string>
#include <vector>

namespace isoperiodic
{

enum class FlowMode { first_order, second_order, both };

std::string to_string(FlowMode mode);
FlowMode flow_mode_from_string(const std::string &name);

inline constexpr int max_pole_parameter = 8;

struct FlowConfig {
    int n = 0;          // the pole of Omega has order n + 2
    Complex A{0.0, 0.0}; // prescribed a-period of Omega
    Complex x0{0.4, 0.0};
    Complex x1{0.6, 0.0};
    SheetedPoint q0{Complex{2.0, 0.0}, 1};
    IVPSpec ivp{};
    FlowMode mode = FlowMode::first_order;
    int samples = 21; // equally spaced in x along [x0, x1], endpoints included
    QuadratureSpec quad{};
    // Added to the computed initial slope of the second-order flow. Zero in
    // production; a nonzero value launches a non-isoperiodic trajectory.
    Complex initial_slope_offset{0.0, 0.0};

    // Throws InvalidArgument (n out of range, samples < 2, x path outside
    // the region) or the SheetedPoint errors for q0.
    void validate(const Region &region) const;
};

struct FlowState {
    Complex x;
    Complex y0;
    Complex y0p;
    int sheet = 1;
};

struct FlowDiagnostics {
    int accepted_steps = 0;
    int rejected_steps = 0;
    int rhs_evaluations = 0;
};

struct FlowResult {
    FlowMode mode = FlowMode::first_order;
    // First-order trajectory, or the second-order one when that is the only
    // mode run.
    std::vector<FlowState> samples;
    std::vector<Complex> B_values;
    Complex B0;
    double max_B_drift = 0.0;
    FlowDiagnostics diagnostics;
    // Mode `both` only: the second-order trajectory and the sup-norm gap in
    // y0 between the two trajectories (NaN otherwise).
    std::vector<FlowState> second_order_samples;
    FlowDiagnostics second_order_diagnostics;
    double mode_gap;
};

// B = 2 pi i / (n + 1)! omega(Q0) L_n + A tau.
Complex b_period(const CurveFamilyPoint &point, const SheetedPoint &q0, int n, Complex A,
                 const PeriodData &periods);

// The slope dy0/dx that keeps B constant at fixed A. Throws
// DegenerateDeformation when L_{n+1} vanishes (relative to the scale of the
// other terms).
Complex initial_slope(const CurveFamilyPoint &point, const SheetedPoint &q0, int n, Complex A,
                      const PeriodData &periods, Complex Ix);

// y0'' from the rational second-order equation for pole parameter n; no
// quadrature. The right-hand side does not involve A. Throws BellSingularity
// when L_{n+1} is negligible and PoleCollision when y0 meets x.
Complex ode_rhs(int n, const FlowState &state);

// Integrates the flow along the straight segment x0 -> x1. Throws RegionExit
// when y0 comes within 1e-6 of a branch point or x leaves the region, and
// solver errors (with the nested cause) otherwise.
FlowResult integrate_flow(const FlowConfig &config, const CycleBasis &cycles);

struct IsoperiodicityReport {
    bool passed = false;
    double max_B_drift = 0.0; // max |B - B0| / |B0|
    double max_slope_residual = 0.0; // max |y0' - slope| / max(1, |slope|)
    std::vector<Complex> B_values;
};

// Recomputes B and the isoperiodic slope from each sample state and checks
// both against tol.
IsoperiodicityReport verify_isoperiodic(const std::vector<FlowState> &samples,
                                        const FlowConfig &config, const CycleBasis &cycles,
                                        double tol);

} // namespace isoperiodic

#endif
