#ifndef ISOPERIODIC_NUMERICS_HPP
#define ISOPERIODIC_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace isoperiodic
{

using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr Complex I_unit{0.0, 1.0};

// Piecewise-linear path in the complex plane. A closed path has an implicit
// last segment from the final vertex back to the first one.
struct PathSpec {
    std::vector<Complex> vertices;
    bool closed = false;
    // Initial number of quadrature panels per segment.
    int samples_hint = 1;

    // Throws InvalidArgument on fewer than two vertices, repeated consecutive
    // vertices, or (for closed paths) a self-intersecting loop.
    void validate() const;

    std::size_t segment_count() const noexcept;
    Complex segment_start(std::size_t segment) const;
    Complex segment_end(std::size_t segment) const;
    Complex point(std::size_t segment, double t) const;

    // Same geometric path traversed backwards. For closed paths the first
    // vertex is kept so the start point does not move.
    PathSpec reversed() const;

    // Every segment split into `factor` equal pieces.
    PathSpec refined(int factor) const;
};

// Location of an integrand evaluation: the point u and where on the path it
// sits. Integrands that depend on a lifted branch use (segment, t).
struct PathPoint {
    Complex u;
    std::size_t segment;
    double t;
};

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_subdivisions = 4000;

    void validate() const;
};

struct QuadratureResult {
    Complex value;
    double error_estimate = 0.0;
    int evaluations = 0;
    int panels = 0;
};

using PathIntegrand = std::function<Complex(const PathPoint &)>;

// Adaptive Gauss-Kronrod (7/15) quadrature of f(u) du along the path. Panels
// are bisected globally by largest error until the estimate is below
// max(abs_tol, rel_tol * |result|). Throws NonConvergence when the panel
// budget is exhausted.
QuadratureResult integrate_path(const PathIntegrand &f, const PathSpec &path,
                                const QuadratureSpec &spec = {});

QuadratureResult integrate_path(const std::function<Complex(Complex)> &f,
                                const PathSpec &path,
                                const QuadratureSpec &spec = {});

// Number of integrate_path invocations made by this thread.
long quadrature_call_count() noexcept;

struct IVPSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    int max_steps = 200000;

    void validate() const;
};

using State = std::vector<Complex>;
using RhsFunction = std::function<State(double, const State &)>;

struct Trajectory {
    std::vector<double> t;
    std::vector<State> y;
    int accepted_steps = 0;
    int rejected_steps = 0;
    int rhs_evaluations = 0;
};

// Dormand-Prince 5(4) with PI step-size control and the 4th-order
// continuous extension. The returned trajectory holds the state at every
// entry of `sample_points`, which must lie between t0 and t1 (inclusive) in
// the direction of integration. An empty sample list returns only t1.
//
// Errors: StepSizeUnderflow, MaxStepsExceeded, RhsEvaluationError (with the
// original exception nested).
Trajectory solve_ivp(const RhsFunction &rhs, double t0, const State &y0,
                     double t1, const IVPSpec &spec = {},
                     std::span<const double> sample_points = {});

struct CentralDifference {
    Complex value;  // Richardson combination (4 fine - coarse) / 3
    Complex coarse; // (g(t+h) - g(t-h)) / 2h
    Complex fine;   // same with h/2
};

CentralDifference central_difference(const std::function<Complex(double)> &g,
                                     double t, double h);

// log2(err_coarse / err_fine): the observed order of a method whose step was
// halved between the two measurements.
double observed_order(double err_coarse, double err_fine);

} // namespace isoperiodic

#endif
