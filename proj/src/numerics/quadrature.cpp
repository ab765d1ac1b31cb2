#include "isoperiodic/errors.hpp"
#include "isoperiodic/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace isoperiodic
{

namespace
{

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are
// shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

thread_local long call_counter = 0;

struct Panel {
    std::size_t segment;
    double t0;
    double t1;
    Complex value;
    double error;

    bool operator<(const Panel &other) const { return error < other.error; }
};

Panel gauss_kronrod(const PathIntegrand &f, const PathSpec &path, std::size_t segment,
                    double t0, double t1, int &evaluations)
{
    const Complex a = path.segment_start(segment);
    const Complex delta = path.segment_end(segment) - a;
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t1 + t0);
    auto eval = [&](double t) {
        ++evaluations;
        return f(PathPoint{a + t * delta, segment, t});
    };

    const Complex centre = eval(mid);
    Complex kronrod = kronrod_weights[7] * centre;
    Complex gauss = gauss_weights[3] * centre;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dt = half * kronrod_nodes[j];
        const Complex sum = eval(mid - dt) + eval(mid + dt);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * sum;
        }
    }
    const Complex jac = half * delta;
    Panel p{segment, t0, t1, kronrod * jac, 0.0};
    p.error = std::abs((kronrod - gauss) * jac);
    // Guard against the estimate underflowing to zero on smooth panels.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value);
    p.error = std::max(p.error, floor);
    return p;
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw InvalidArgument("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw InvalidArgument("QuadratureSpec: max_subdivisions must be >= 1");
    }
}

long quadrature_call_count() noexcept { return call_counter; }

QuadratureResult integrate_path(const PathIntegrand &f, const PathSpec &path,
                                const QuadratureSpec &spec)
{
    ++call_counter;
    spec.validate();
    path.validate();

    QuadratureResult result;
    std::priority_queue<Panel> panels;
    Complex total{0.0, 0.0};
    double total_error = 0.0;

    const std::size_t nseg = path.segment_count();
    const int per_segment = path.samples_hint;
    for (std::size_t s = 0; s < nseg; ++s) {
        for (int k = 0; k < per_segment; ++k) {
            Panel p = gauss_kronrod(f, path, s, static_cast<double>(k) / per_segment,
                                    static_cast<double>(k + 1) / per_segment,
                                    result.evaluations);
            total += p.value;
            total_error += p.error;
            panels.push(p);
        }
    }

    int subdivisions = 0;
    while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (subdivisions >= spec.max_subdivisions) {
            throw NonConvergence("integrate_path: subdivision budget exhausted, error estimate "
                                     + std::to_string(total_error),
                                 total_error);
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.t0 + worst.t1);
        if (!(worst.t0 < mid && mid < worst.t1)) {
            throw NonConvergence("integrate_path: panel width reached machine resolution",
                                 total_error);
        }
        Panel left = gauss_kronrod(f, path, worst.segment, worst.t0, mid, result.evaluations);
        Panel right = gauss_kronrod(f, path, worst.segment, mid, worst.t1, result.evaluations);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }

    // Re-sum from scratch: the running total accumulates cancellation error.
    total = Complex{0.0, 0.0};
    total_error = 0.0;
    result.panels = static_cast<int>(panels.size());
    while (!panels.empty()) {
        total += panels.top().value;
        total_error += panels.top().error;
        panels.pop();
    }
    result.value = total;
    result.error_estimate = total_error;
    return result;
}

QuadratureResult integrate_path(const std::function<Complex(Complex)> &f, const PathSpec &path,
                                const QuadratureSpec &spec)
{
    return integrate_path(PathIntegrand{[&f](const PathPoint &p) { return f(p.u); }}, path,
                          spec);
}

} // namespace isoperiodic
