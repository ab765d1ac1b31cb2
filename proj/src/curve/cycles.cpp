#include "isoperiodic/curve.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isoperiodic
{

namespace
{

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double point_segment_distance(Complex p, Complex a, Complex b)
{
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) {
        return std::abs(p - a);
    }
    const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double segment_segment_distance(Complex p1, Complex p2, Complex q1, Complex q2)
{
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return 0.0;
    }
    return std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                     point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
}

double loop_distance_to_point(const PathSpec &loop, Complex p)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < loop.segment_count(); ++s) {
        d = std::min(d, point_segment_distance(p, loop.segment_start(s), loop.segment_end(s)));
    }
    return d;
}

double loop_distance_to_region(const PathSpec &loop, const Region &region)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < loop.segment_count(); ++s) {
        d = std::min(d, segment_segment_distance(loop.segment_start(s), loop.segment_end(s),
                                                 region.start, region.end));
    }
    return d - region.radius;
}

// Counter-clockwise convex hull (Andrew's monotone chain), collinear points
// dropped. Returns 1, 2 or more vertices.
std::vector<Complex> convex_hull(std::vector<Complex> pts)
{
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Complex a, Complex b) { return std::abs(a - b) < 1e-14; }),
              pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Complex> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto &p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double distance_to_hull(const std::vector<Complex> &hull, Complex p)
{
    if (hull.size() == 1) {
        return std::abs(p - hull[0]);
    }
    if (hull.size() >= 3) {
        bool inside = true;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            if (cross(hull[(i + 1) % hull.size()] - hull[i], p - hull[i]) < 0.0) {
                inside = false;
                break;
            }
        }
        if (inside) {
            return 0.0;
        }
    }
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        d = std::min(d, point_segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
    }
    return d;
}

// Boundary of hull + disk(offset), traversed counter-clockwise, as a polygon
// with arc steps of at most pi/16 and straight pieces no longer than
// offset/2.
PathSpec rounded_hull_loop(const std::vector<Complex> &hull, double offset)
{
    PathSpec loop;
    loop.closed = true;
    constexpr double max_arc_step = pi / 16.0;
    const double max_edge = 0.5 * offset;

    if (hull.size() == 1) {
        const int n = 32;
        for (int k = 0; k < n; ++k) {
            loop.vertices.push_back(hull[0] + std::polar(offset, pi + 2.0 * pi * k / n));
        }
        return loop;
    }

    const std::size_t m = hull.size();
    auto outward = [](Complex from, Complex to) {
        const Complex d = to - from;
        return -I_unit * d / std::abs(d);
    };
    for (std::size_t i = 0; i < m; ++i) {
        const Complex prev = hull[(i + m - 1) % m];
        const Complex here = hull[i];
        const Complex next = hull[(i + 1) % m];
        const double theta_in = std::arg(outward(prev, here));
        double theta_out = std::arg(outward(here, next));
        while (theta_out < theta_in) {
            theta_out += 2.0 * pi;
        }
        const int arc_steps =
            std::max(2, static_cast<int>(std::ceil((theta_out - theta_in) / max_arc_step)));
        for (int j = 0; j <= arc_steps; ++j) {
            const double theta = theta_in + (theta_out - theta_in) * j / arc_steps;
            loop.vertices.push_back(here + std::polar(offset, theta));
        }
        const Complex edge_a = here + offset * outward(here, next);
        const Complex edge_b = next + offset * outward(here, next);
        const int pieces =
            std::max(1, static_cast<int>(std::ceil(std::abs(edge_b - edge_a) / max_edge)));
        for (int j = 1; j < pieces; ++j) {
            loop.vertices.push_back(edge_a + (edge_b - edge_a) * (static_cast<double>(j) / pieces));
        }
    }
    return loop;
}

} // namespace

Region Region::disk(Complex centre, double radius) { return Region{centre, centre, radius}; }

Region Region::segment(Complex a, Complex b, double radius) { return Region{a, b, radius}; }

Region Region::around(Complex x)
{
    return disk(x, 0.25 * std::min(std::abs(x), std::abs(x - 1.0)));
}

double Region::distance_to(Complex p) const noexcept
{
    return std::max(0.0, point_segment_distance(p, start, end) - radius);
}

bool Region::contains(Complex p) const noexcept
{
    return point_segment_distance(p, start, end) <= radius * (1.0 + 1e-12);
}

void Region::validate() const
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("Region: radius must be positive");
    }
    if (!(distance_to(0.0) > 0.0) || !(distance_to(1.0) > 0.0)) {
        throw DegenerateCurve("Region: the working region must keep a positive clearance "
                              "from the branch points 0 and 1");
    }
}

CurveFamilyPoint::CurveFamilyPoint(Complex x_, Region region_) : x(x_), region(region_)
{
    if (std::abs(x) < 1e-8 || std::abs(x - 1.0) < 1e-8) {
        throw DegenerateCurve("CurveFamilyPoint: x coincides with a branch point 0 or 1");
    }
    region.validate();
    if (!region.contains(x)) {
        throw InvalidArgument("CurveFamilyPoint: x lies outside its working region");
    }
}

int winding_number(const PathSpec &loop, Complex p)
{
    double total = 0.0;
    for (std::size_t s = 0; s < loop.segment_count(); ++s) {
        total += std::arg((loop.segment_end(s) - p) / (loop.segment_start(s) - p));
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

Complex CycleBasis::a_start_value(Complex x) const
{
    const Complex u = a_loop.vertices.front();
    return a_start_value_ref * std::sqrt((u - x) / (u - region.centre()));
}

Complex CycleBasis::b_start_value(Complex x) const
{
    const Complex u = b_loop.vertices.front();
    return b_start_value_ref * std::sqrt((u - x) / (u - region.centre()));
}

CycleBasis make_cycle_basis(const Region &region, const QuadratureSpec &spec)
{
    region.validate();
    const std::vector<Complex> hull_a = convex_hull({0.0, region.start, region.end});
    const std::vector<Complex> hull_b = convex_hull({1.0, region.start, region.end});
    const double room = std::min(distance_to_hull(hull_a, 1.0), distance_to_hull(hull_b, 0.0))
                        - region.radius;
    if (!(room > 0.0)) {
        throw InvalidGeometry("make_cycle_basis: no convex loop separates the region and 0 "
                              "from 1 (or the region and 1 from 0)");
    }
    const double offset = region.radius + 0.5 * room;

    CycleBasis basis;
    basis.region = region;
    basis.a_loop = rounded_hull_loop(hull_a, offset);
    basis.b_loop = rounded_hull_loop(hull_b, offset);
    basis.a_loop.validate();
    basis.b_loop.validate();

    const Complex c = region.centre();
    if (winding_number(basis.a_loop, 0.0) != 1 || winding_number(basis.a_loop, c) != 1
        || winding_number(basis.a_loop, 1.0) != 0 || winding_number(basis.b_loop, 1.0) != 1
        || winding_number(basis.b_loop, c) != 1 || winding_number(basis.b_loop, 0.0) != 0) {
        throw InvalidGeometry("make_cycle_basis: loops do not separate the branch points");
    }

    basis.clearance = std::min({loop_distance_to_point(basis.a_loop, 0.0),
                                loop_distance_to_point(basis.a_loop, 1.0),
                                loop_distance_to_point(basis.b_loop, 0.0),
                                loop_distance_to_point(basis.b_loop, 1.0),
                                loop_distance_to_region(basis.a_loop, region),
                                loop_distance_to_region(basis.b_loop, region)});
    if (!(basis.clearance > 0.0)) {
        throw InvalidGeometry("make_cycle_basis: loops touch a branch point or the region");
    }

    basis.a_start_value_ref = std::sqrt(curve_polynomial(basis.a_loop.vertices.front(), c));
    basis.b_start_value_ref = std::sqrt(curve_polynomial(basis.b_loop.vertices.front(), c));

    const PeriodData probe = compute_periods(CurveFamilyPoint(c, region), basis, spec,
                                             PeriodOptions{true, false});
    if (probe.b_reversed) {
        basis.b_loop = basis.b_loop.reversed();
        basis.b_reversed = true;
    }
    return basis;
}

} // namespace isoperiodic
