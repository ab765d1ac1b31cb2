#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace isoperiodic
{

namespace
{

constexpr double max_relative_jump = 0.5;
constexpr double min_parameter_step = 1e-12;

// Square root of the curve polynomial whose sign is nearest to `reference`.
Complex nearest_root(Complex u, Complex x, Complex reference)
{
    const Complex w = std::sqrt(curve_polynomial(u, x));
    return std::abs(w - reference) <= std::abs(w + reference) ? w : -w;
}

double segment_clearance(Complex a, Complex b, Complex p)
{
    const Complex d = b - a;
    const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

} // namespace

LiftedPath::LiftedPath(Complex x, PathSpec path, Complex v_start, double clearance)
    : x_(x), path_(std::move(path))
{
    path_.validate();
    if (!(clearance > 0.0)) {
        throw InvalidArgument("lift_sqrt_along_path: clearance must be positive");
    }
    const std::array<Complex, 3> branch_points{Complex{0.0, 0.0}, Complex{1.0, 0.0}, x};
    for (std::size_t s = 0; s < path_.segment_count(); ++s) {
        for (const Complex p : branch_points) {
            if (segment_clearance(path_.segment_start(s), path_.segment_end(s), p) < clearance) {
                throw BranchPointCollision("lift_sqrt_along_path: segment " + std::to_string(s)
                                           + " passes within the clearance of a branch point");
            }
        }
    }
    const Complex p0 = curve_polynomial(path_.vertices.front(), x);
    if (std::abs(v_start * v_start - p0) > 1e-8 * std::max(std::abs(p0), 1e-300)) {
        throw InvalidArgument("lift_sqrt_along_path: v_start^2 does not match the curve at the "
                              "path start");
    }

    nodes_.resize(path_.segment_count());
    Complex v = v_start;
    for (std::size_t s = 0; s < path_.segment_count(); ++s) {
        continue_segment(s, v);
        v = nodes_[s].back().v;
    }
}

void LiftedPath::continue_segment(std::size_t segment, Complex v_begin)
{
    const Complex a = path_.segment_start(segment);
    const Complex b = path_.segment_end(segment);
    double nearest = std::min({std::abs(a), std::abs(a - 1.0), std::abs(a - x_)});
    nearest = std::min({nearest, std::abs(b), std::abs(b - 1.0), std::abs(b - x_)});
    nearest = std::min({nearest, segment_clearance(a, b, 0.0), segment_clearance(a, b, 1.0),
                        segment_clearance(a, b, x_)});
    const int initial_steps =
        std::max(4, static_cast<int>(std::ceil(2.0 * std::abs(b - a) / nearest)));

    auto &nodes = nodes_[segment];
    nodes.clear();
    nodes.push_back(Node{0.0, v_begin});
    double t = 0.0;
    double dt = 1.0 / initial_steps;
    Complex v = v_begin;
    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        const Complex candidate = nearest_root(a + t_next * (b - a), x_, v);
        if (std::abs(candidate - v) >= max_relative_jump * std::abs(v)) {
            dt *= 0.5;
            if (dt < min_parameter_step) {
                throw ContinuationAmbiguity("lift_sqrt_along_path: cannot keep the relative "
                                            "jump below 0.5 on segment "
                                            + std::to_string(segment));
            }
            continue;
        }
        t = t_next;
        v = candidate;
        nodes.push_back(Node{t, v});
    }
}

Complex LiftedPath::value(const PathPoint &where) const
{
    const auto &nodes = nodes_.at(where.segment);
    const double t = std::clamp(where.t, 0.0, 1.0);
    auto hi = std::lower_bound(nodes.begin(), nodes.end(), t,
                               [](const Node &n, double value) { return n.t < value; });
    if (hi == nodes.begin()) {
        ++hi;
    }
    if (hi == nodes.end()) {
        --hi;
    }
    const auto lo = hi - 1;
    const double w = (t - lo->t) / (hi->t - lo->t);
    const Complex guess = (1.0 - w) * lo->v + w * hi->v;
    return nearest_root(where.u, x_, guess);
}

std::size_t LiftedPath::node_count() const noexcept
{
    std::size_t n = 0;
    for (const auto &seg : nodes_) {
        n += seg.size();
    }
    return n;
}

LiftedPath lift_sqrt_along_path(Complex x, const PathSpec &path, Complex v_start,
                                double clearance)
{
    return LiftedPath(x, path, v_start, clearance);
}

LiftedPath lift_sqrt_along_path(const CurveFamilyPoint &point, const PathSpec &path,
                                Complex v_start, double clearance)
{
    return LiftedPath(point.x, path, v_start, clearance);
}

} // namespace isoperiodic
