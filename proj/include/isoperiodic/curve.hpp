#ifndef ISOPERIODIC_CURVE_HPP
#define ISOPERIODIC_CURVE_HPP

// The elliptic family v^2 = u (u - 1) (u - x): fixed homology loops,
// branch continuation of v, periods, and evaluations of the normalized
// holomorphic differential and of the second-kind normalization constants.

#include "isoperiodic/numerics.hpp"

#include <array>
#include <string>
#include <vector>

namespace isoperiodic
{

// Working region of the modulus: all points within `radius` of the segment
// [start, end]. A disk is the degenerate case start == end.
struct Region {
    Complex start;
    Complex end;
    double radius = 0.0;

    static Region disk(Complex centre, double radius);
    static Region segment(Complex a, Complex b, double radius);
    // Disk around x with radius a quarter of its distance to {0, 1}.
    static Region around(Complex x);

    Complex centre() const noexcept { return 0.5 * (start + end); }
    // Distance from p to the region; zero inside.
    double distance_to(Complex p) const noexcept;
    bool contains(Complex p) const noexcept;
    // Radius must be positive and the region must keep a positive distance
    // from both 0 and 1.
    void validate() const;
};

struct CurveFamilyPoint {
    Complex x;
    Region region;

    CurveFamilyPoint(Complex x, Region region);
    explicit CurveFamilyPoint(Complex x) : CurveFamilyPoint(x, Region::around(x)) {}

    // Same region, different modulus (must stay inside the region).
    CurveFamilyPoint moved_to(Complex new_x) const { return {new_x, region}; }
};

// Canonical cycles realized as x-independent loops in the u-plane. The
// a-loop encircles 0 and the whole region, the b-loop encircles the region
// and 1. The start value of v on each loop is continued over the region from
// the principal branch at the region centre, so periods are continuous in x.
struct CycleBasis {
    PathSpec a_loop;
    PathSpec b_loop;
    // Minimum distance from either loop to 0, 1 and the region.
    double clearance = 0.0;
    Region region;
    Complex a_start_value_ref; // v at a_loop.vertices[0] for x = region centre
    Complex b_start_value_ref;
    // True when the b-loop was reversed to make Im(tau) > 0.
    bool b_reversed = false;

    Complex a_start_value(Complex x) const;
    Complex b_start_value(Complex x) const;
};

// Builds rounded convex hulls around {0} + region and region + {1}, placed
// midway between the region and the nearest excluded point, then orients the
// b-loop so that Im(tau) > 0 at the region centre. Throws InvalidGeometry
// when 1 lies in the hull of {0} + region (or 0 in that of region + {1}).
CycleBasis make_cycle_basis(const Region &region, const QuadratureSpec &spec = {});

// Winding number of a closed path around p (rounded to the nearest integer).
int winding_number(const PathSpec &loop, Complex p);

// Pole position Q0 on the double cover: v(Q0) = sheet * principal sqrt.
struct SheetedPoint {
    Complex y0;
    int sheet = 1;

    Complex v(Complex x) const;
    SheetedPoint flipped() const { return {y0, -sheet}; }
    // Throws PoleAtRamification if y0 is within 1e-8 of {0, 1, x} and
    // InvalidArgument for a sheet other than +-1.
    void validate(Complex x) const;

    // Sheet whose value of v at x is nearest to `reference`.
    static SheetedPoint nearest(Complex y0, Complex x, Complex reference);
};

// The polynomial u (u - 1) (u - x).
inline Complex curve_polynomial(Complex u, Complex x) { return u * (u - 1.0) * (u - x); }

// Square roots entering the evaluations at ramification points, continued
// from the principal branch at the region centre:
// sqrt(x), sqrt(1 - x), and sqrt(x (x - 1)) = i sqrt(x) sqrt(1 - x).
struct BranchRoots {
    Complex sqrt_x;
    Complex sqrt_one_minus_x;
    Complex sqrt_x_x_minus_1;
};

BranchRoots branch_roots(const CurveFamilyPoint &point);

// v(u) continued along a path from a given start value.
class LiftedPath
{
public:
    LiftedPath(Complex x, PathSpec path, Complex v_start, double clearance);

    // v at a point of the path: the square root nearest to the interpolated
    // continuation nodes.
    Complex value(const PathPoint &where) const;
    Complex start_value() const { return nodes_.front().front().v; }
    Complex end_value() const { return nodes_.back().back().v; }
    const PathSpec &path() const noexcept { return path_; }
    std::size_t node_count() const noexcept;

private:
    struct Node {
        double t;
        Complex v;
    };

    void continue_segment(std::size_t segment, Complex v_begin);

    Complex x_;
    PathSpec path_;
    std::vector<std::vector<Node>> nodes_;
};

// Continuation by the nearest-of-(+-) rule, refining until the relative jump
// per step is below 0.5. Errors: BranchPointCollision when the path passes
// within `clearance` of 0, 1 or x; ContinuationAmbiguity when refinement
// fails; InvalidArgument when v_start^2 does not match the curve.
LiftedPath lift_sqrt_along_path(Complex x, const PathSpec &path, Complex v_start,
                                double clearance = 1e-8);
LiftedPath lift_sqrt_along_path(const CurveFamilyPoint &point, const PathSpec &path,
                                Complex v_start, double clearance = 1e-8);

struct PeriodOptions {
    bool with_b_period = true;
    // Recompute the a-period on a refined loop and require agreement to 1e-9.
    bool verify_normalization = true;
};

struct PeriodData {
    Complex I0;  // a-period of du/v
    Complex tau; // b-period of the normalized differential (NaN without b)
    Complex Ix;  // normalization constant of W(., P_x)
    // The a-loop integral of du / (v (u - x)).
    Complex a_integral_pole_x;
    // |refined a-period / I0 - 1| (zero when not verified).
    double normalization_error = 0.0;
    // Orientation applied to the b-loop integral at this x.
    bool b_reversed = false;
};

// I0 by lifted-loop quadrature, tau = (1/I0) * b-period, and
// Ix = -(1/omega(P_x)) * a-period of omega / (u - x).
PeriodData compute_periods(const CurveFamilyPoint &point, const CycleBasis &cycles,
                           const QuadratureSpec &spec = {}, const PeriodOptions &options = {});

struct DifferentialEvaluations {
    Complex omega_P0;
    Complex omega_P1;
    Complex omega_Px;
    Complex omega_Q0;
    Complex v_Q0;
};

// Values of omega in the standard local parameters:
// omega(P0) = 2/(I0 sqrt x), omega(P1) = 2/(I0 sqrt(1 - x)),
// omega(Px) = 2/(I0 sqrt(x (x - 1))), omega(Q0) = 1/(I0 v(Q0)).
DifferentialEvaluations eval_omega(const CurveFamilyPoint &point, const PeriodData &periods,
                                   const SheetedPoint &q0);

// Normalization constants of W(., P_x), W(., P_0), W(., P_1), each fixed by
// a vanishing a-period and computed by its own loop integral.
struct SecondKindConstants {
    Complex at_x;
    Complex at_0;
    Complex at_1;
};

SecondKindConstants compute_Ix(const CurveFamilyPoint &point, const CycleBasis &cycles,
                               const PeriodData &periods, const QuadratureSpec &spec = {});

// Relative residuals of
//   I^0/w(P0) = I^x/w(Px) - x I0^2 / 4,
//   I^1/w(P1) = I^x/w(Px) - (x - 1) I0^2 / 4,
//   I^0/w(P0) = I^1/w(P1) - I0^2 / 4.
struct NormalizationRelations {
    double zero_x = 0.0;
    double one_x = 0.0;
    double zero_one = 0.0;

    double max() const;
};

NormalizationRelations check_normalization_relations(const CurveFamilyPoint &point,
                                                     const PeriodData &periods,
                                                     const SecondKindConstants &constants);

// W(Q0, Px) = (1/(omega(Px)(y0 - x)) + Ix) omega(Q0).
Complex eval_W_Q0_Px(const CurveFamilyPoint &point, const PeriodData &periods, Complex Ix,
                     const SheetedPoint &q0);

// Total x-derivative of W(Q0, Px) along a motion y0(x) with slope y0p.
Complex dW_Q0_Px_dx(const CurveFamilyPoint &point, const PeriodData &periods,
                    const SheetedPoint &q0, Complex y0p);

struct RauchResidual {
    std::string name;
    Complex predicted;
    Complex difference_h;    // central difference with step h
    Complex difference_half; // with step h/2
    double residual_h = 0.0;
    double residual_half = 0.0;
    double relative = 0.0; // residual_h / |predicted|
    double ratio = 0.0;    // residual_h / residual_half, ~4 for O(h^2)
};

struct RauchReport {
    double h = 0.0;
    // tau, omega(Q0) at fixed y0, omega(Px), W(Q0, Px) at fixed y0.
    std::array<RauchResidual, 4> entries;
};

// Central differences in x of tau, omega(Q0), omega(Px) and W(Q0, Px) compared
// with the variational formulas dtau/dx = pi i omega^2(Px),
// d omega(Q0)/dx = omega(Px) W(Q0, Px)/2,
// d omega(Px)/dx = omega(Px)/2 (Ix omega(Px) - 1/x - 1/(x - 1)) and the
// total derivative of W(Q0, Px) with y0 held fixed.
RauchReport rauch_check(const CurveFamilyPoint &point, const CycleBasis &cycles,
                        const SheetedPoint &q0, double h,
                        const QuadratureSpec &spec = {1e-14, 1e-16, 20000});

} // namespace isoperiodic

#endif
