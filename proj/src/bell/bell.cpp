#include "isoperiodic/bell.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace isoperiodic
{

namespace
{

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

// n! / (n - k)!
double falling(int n, int k)
{
    double f = 1.0;
    for (int j = 0; j < k; ++j) {
        f *= n - j;
    }
    return f;
}

} // namespace

SigmaVector sigma_vector(Complex x, Complex y0, int N)
{
    if (N < 1) {
        throw InvalidArgument("sigma_vector: N must be at least 1");
    }
    if (std::abs(y0) < 1e-8 || std::abs(y0 - 1.0) < 1e-8 || std::abs(y0 - x) < 1e-8) {
        throw PoleAtRamification("sigma_vector: y0 coincides with a branch point");
    }
    SigmaVector s;
    s.x = x;
    s.y0 = y0;
    s.values.assign(static_cast<std::size_t>(N) + 1, Complex{});
    s.values[0] = 3.0;
    const Complex r0 = 1.0 / (0.0 - y0);
    const Complex r1 = 1.0 / (1.0 - y0);
    const Complex rx = 1.0 / (x - y0);
    Complex p0 = 1.0, p1 = 1.0, px = 1.0;
    for (int k = 1; k <= N; ++k) {
        p0 *= r0;
        p1 *= r1;
        px *= rx;
        s.values[static_cast<std::size_t>(k)] = p0 + p1 + px;
    }
    return s;
}

SigmaVector sigma_from_values(std::vector<Complex> sigma_1_to_N)
{
    SigmaVector s;
    s.values.reserve(sigma_1_to_N.size() + 1);
    s.values.push_back(3.0);
    s.values.insert(s.values.end(), sigma_1_to_N.begin(), sigma_1_to_N.end());
    s.x = Complex{std::nan(""), std::nan("")};
    s.y0 = s.x;
    return s;
}

BellTable bell_table_recursive(const SigmaVector &sigma, int N)
{
    if (N < 0) {
        throw InvalidArgument("bell_table_recursive: N must be non-negative");
    }
    if (N > 0 && sigma.size() < N) {
        throw InvalidArgument("bell_table_recursive: need Sigma_1..Sigma_N");
    }
    BellTable t;
    t.sigma = sigma;
    t.values.assign(static_cast<std::size_t>(N) + 1, Complex{});
    t.values[0] = 1.0;
    for (int n = 0; n < N; ++n) {
        Complex acc{};
        for (int k = 0; k <= n; ++k) {
            acc += 0.5 * falling(n, k) * t[n - k] * sigma[k + 1];
        }
        t.values[static_cast<std::size_t>(n) + 1] = acc;
    }
    return t;
}

Complex bell_explicit(int l, const SigmaVector &sigma)
{
    if (l < 0) {
        throw InvalidArgument("bell_explicit: l must be non-negative");
    }
    if (l > max_explicit_order) {
        throw PartitionBoundExceeded("bell_explicit: partition enumeration is capped at l = "
                                     + std::to_string(max_explicit_order));
    }
    if (l == 0) {
        return 1.0;
    }
    if (sigma.size() < l) {
        throw InvalidArgument("bell_explicit: need Sigma_1..Sigma_l");
    }

    // Depth-first over multiplicities p_k for parts k = l, l-1, ..., 1; each
    // part k with multiplicity p contributes (Sigma_k / (2k))^p / p!.
    Complex total{};
    std::function<void(int, int, Complex)> visit = [&](int part, int remaining, Complex term) {
        if (remaining == 0) {
            total += term;
            return;
        }
        if (part == 0) {
            return;
        }
        const Complex unit = sigma[part] / (2.0 * part);
        Complex factor = 1.0;
        for (int p = 0; p * part <= remaining; ++p) {
            visit(part - 1, remaining - p * part, term * factor);
            factor *= unit / static_cast<double>(p + 1);
        }
    };
    visit(l, l, 1.0);
    return factorial(l) * total;
}

Complex ratio_derivative(int n, Complex x, Complex y0, const BellTable &bell)
{
    if (n < 0 || bell.size() < n) {
        throw InvalidArgument("ratio_derivative: need L_0..L_n");
    }
    if (std::abs(x - y0) < 1e-8) {
        throw PoleCollision("ratio_derivative: y0 collides with x");
    }
    const Complex r = 1.0 / (x - y0);
    Complex power = r;
    Complex acc{};
    for (int k = 0; k <= n; ++k) {
        acc += falling(n, k) * bell[n - k] * power;
        power *= r;
    }
    return acc;
}

BellTable bell_table(Complex x, Complex y0, int N)
{
    return bell_table_recursive(sigma_vector(x, y0, std::max(N, 1)), N);
}

} // namespace isoperiodic
