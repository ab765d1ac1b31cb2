#ifndef ISOPERIODIC_BOUSSINESQ_HPP
#define ISOPERIODIC_BOUSSINESQ_HPP

// Genus-one theta solutions
//     u(X, Y) = 2 d^2/dX^2 log theta(X U + Y V + z0) + c
// of the Boussinesq equation 3 u_YY + (6 u u_X + u_XXX)_X = 0, with wave
// number U and frequency V taken from the normalized second-kind
// differentials at Q0.

#include "isoperiodic/curve.hpp"
#include "isoperiodic/theta.hpp"

#include <optional>
#include <vector>

namespace isoperiodic
{

struct WaveData {
    Complex U;
    Complex V;
    Complex z0;
    std::optional<Complex> c; // unset until solve_c
    Complex tau;
};

// U = -omega(Q0), V = -omega(Q0) L_1.
WaveData compute_wave_data(const CurveFamilyPoint &point, const SheetedPoint &q0,
                           const PeriodData &periods, Complex z0 = {0.0, 0.0});

struct GridSpec {
    double X0 = 0.0, X1 = 1.0;
    double Y0 = 0.0, Y1 = 1.0;
    int nx = 64, ny = 64;

    // One X-period by one Y-period: [0, |1/U|] x [0, |1/V|].
    static GridSpec one_period(const WaveData &wave, int nx = 64, int ny = 64);
    void validate() const; // counts >= 8, non-empty ranges
    double X(int i) const { return X0 + (X1 - X0) * i / (nx - 1); }
    double Y(int j) const { return Y0 + (Y1 - Y0) * j / (ny - 1); }
};

// d^a/dX^a d^b/dY^b u at (X, Y), a + b <= 4. With a = b = 0 the constant c
// is included (taken as 0 when unset). Throws ThetaDivisorProximity when
// theta is within 1e-12 of zero relative to its series scale.
Complex u_hat(double X, double Y, const WaveData &wave, const ThetaParams &params, int dX_order = 0,
              int dY_order = 0);

// u and the derivatives entering the equation at every grid point.
struct GridSample {
    double X = 0.0;
    double Y = 0.0;
    Complex theta;
    Complex u, u_X, u_XX, u_XXXX, u_YY; // u without c
    bool near_divisor = false;          // |theta| < 1e-8 max |theta|
};

std::vector<GridSample> sample_grid(const WaveData &wave, const ThetaParams &params,
                                    const GridSpec &grid);

struct CFit {
    Complex c;
    // max |c_i - c| / max(|c|, |U|^2) over pointwise solutions c_i at points
    // where |u_XX| >= 0.1 max |u_XX|.
    double spread = 0.0;
    int points_used = 0;
};

// The equation residual is affine in c: R(c) = R0 + 6 c u_XX. Least-squares
// c over the grid. Throws IllConditioned when u_XX is negligible.
CFit solve_c(const WaveData &wave, const ThetaParams &params, const GridSpec &grid);

struct ResidualReport {
    double max_relative = 0.0;
    int excluded_points = 0;
    // Per-point |residual| / max(term magnitudes), row-major in (Y, X);
    // NaN at excluded points.
    std::vector<double> relative;
    std::vector<GridSample> samples;
};

// |3 u_YY + 6 u_X^2 + 6 u u_XX + u_XXXX| / max(|3 u_YY|, |6 u_X^2|,
// |6 u u_XX|, |u_XXXX|), maximised over the grid. Requires c to be set.
ResidualReport boussinesq_residual(const WaveData &wave, const ThetaParams &params,
                                   const GridSpec &grid);

enum class LatticeDirection { X, Y };

struct LatticeCheck {
    bool on_lattice = false;
    long m = 0; // nearest lattice point m + n tau
    long n = 0;
    double distance = 0.0;
    Complex shift; // T U or T V
};

// Whether T U (or T V) lies within 1e-8 of Z + tau Z.
LatticeCheck periodicity_lattice_check(const WaveData &wave, double T, LatticeDirection direction);

struct EffectivizationReport {
    Complex theta1_ratio; // theta1'''(0) / theta1'(0)
    Complex rho_plus;     // V / ((4 pi i sqrt(3)/3) U^2 sqrt(ratio)), principal root
    Complex rho_minus;    // with the opposite root
};

EffectivizationReport effectivization_diagnostic(const WaveData &wave, const ThetaParams &params);

} // namespace isoperiodic

#endif
