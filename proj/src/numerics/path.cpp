#include "isoperiodic/errors.hpp"
#include "isoperiodic/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace isoperiodic
{

namespace
{

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2, double tol)
{
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
        return true;
    }
    auto on_segment = [tol](Complex a, Complex b, Complex p) {
        if (std::abs(cross(b - a, p - a)) > tol) {
            return false;
        }
        return std::min(a.real(), b.real()) - tol <= p.real()
               && p.real() <= std::max(a.real(), b.real()) + tol
               && std::min(a.imag(), b.imag()) - tol <= p.imag()
               && p.imag() <= std::max(a.imag(), b.imag()) + tol;
    };
    return on_segment(p1, p2, q1) || on_segment(p1, p2, q2) || on_segment(q1, q2, p1)
           || on_segment(q1, q2, p2);
}

} // namespace

void PathSpec::validate() const
{
    if (vertices.size() < 2) {
        throw InvalidArgument("PathSpec: at least two vertices are required");
    }
    if (samples_hint < 1) {
        throw InvalidArgument("PathSpec: samples_hint must be positive");
    }
    double scale = 0.0;
    for (const auto &v : vertices) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw InvalidArgument("PathSpec: non-finite vertex");
        }
        scale = std::max(scale, std::abs(v));
    }
    const double tol = 1e-14 * std::max(scale, 1.0);
    const std::size_t nseg = segment_count();
    for (std::size_t s = 0; s < nseg; ++s) {
        if (std::abs(segment_end(s) - segment_start(s)) <= tol) {
            throw InvalidArgument("PathSpec: consecutive vertices coincide at segment "
                                  + std::to_string(s));
        }
    }
    if (!closed) {
        return;
    }
    if (vertices.size() < 3) {
        throw InvalidArgument("PathSpec: a closed path needs at least three vertices");
    }
    // Non-adjacent segments of a simple loop never meet.
    const double area_tol = tol * tol;
    for (std::size_t i = 0; i < nseg; ++i) {
        for (std::size_t j = i + 2; j < nseg; ++j) {
            if (i == 0 && j == nseg - 1) {
                continue;
            }
            if (segments_intersect(segment_start(i), segment_end(i), segment_start(j),
                                   segment_end(j), area_tol)) {
                throw InvalidArgument("PathSpec: closed path self-intersects (segments "
                                      + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

std::size_t PathSpec::segment_count() const noexcept
{
    if (vertices.size() < 2) {
        return 0;
    }
    return closed ? vertices.size() : vertices.size() - 1;
}

Complex PathSpec::segment_start(std::size_t segment) const { return vertices.at(segment); }

Complex PathSpec::segment_end(std::size_t segment) const
{
    return vertices.at((segment + 1) % vertices.size());
}

Complex PathSpec::point(std::size_t segment, double t) const
{
    const Complex a = segment_start(segment);
    return a + t * (segment_end(segment) - a);
}

PathSpec PathSpec::reversed() const
{
    PathSpec out = *this;
    if (closed) {
        std::reverse(out.vertices.begin() + 1, out.vertices.end());
    } else {
        std::reverse(out.vertices.begin(), out.vertices.end());
    }
    return out;
}

PathSpec PathSpec::refined(int factor) const
{
    if (factor < 1) {
        throw InvalidArgument("PathSpec::refined: factor must be positive");
    }
    PathSpec out;
    out.closed = closed;
    out.samples_hint = samples_hint;
    const std::size_t nseg = segment_count();
    for (std::size_t s = 0; s < nseg; ++s) {
        for (int k = 0; k < factor; ++k) {
            out.vertices.push_back(point(s, static_cast<double>(k) / factor));
        }
    }
    if (!closed) {
        out.vertices.push_back(vertices.back());
    }
    return out;
}

} // namespace isoperiodic
