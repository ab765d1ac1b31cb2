#include "isoperiodic/boussinesq.hpp"
#include "isoperiodic/bell.hpp"
#include "isoperiodic/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace isoperiodic
{

namespace
{

constexpr double divisor_fraction = 1e-8;

// Log-derivatives kappa_k = d^k log theta from the ratios a_k = theta^(k) / theta
// via kappa_n = a_n - sum_{k=1}^{n-1} C(n-1, k-1) kappa_k a_{n-k}.
std::array<Complex, max_theta_order + 1> log_derivatives(const std::array<Complex, max_theta_order + 1> &d,
                                                         int top)
{
    std::array<Complex, max_theta_order + 1> a{}, kappa{};
    for (int k = 1; k <= top; ++k) {
        a[k] = d[k] / d[0];
    }
    for (int n = 1; n <= top; ++n) {
        Complex acc = a[n];
        double binom = 1.0; // C(n-1, k-1)
        for (int k = 1; k < n; ++k) {
            acc -= binom * kappa[k] * a[n - k];
            binom = binom * (n - k) / k;
        }
        kappa[n] = acc;
    }
    return kappa;
}

Complex phase(double X, double Y, const WaveData &w) { return X * w.U + Y * w.V + w.z0; }

} // namespace

WaveData compute_wave_data(const CurveFamilyPoint &point, const SheetedPoint &q0,
                           const PeriodData &periods, Complex z0)
{
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const BellTable L = bell_table(point.x, q0.y0, 1);
    WaveData w;
    w.U = -e.omega_Q0;
    w.V = -e.omega_Q0 * L[1];
    w.z0 = z0;
    w.tau = periods.tau;
    return w;
}

GridSpec GridSpec::one_period(const WaveData &wave, int nx, int ny)
{
    GridSpec g;
    g.X0 = 0.0;
    g.X1 = std::abs(1.0 / wave.U);
    g.Y0 = 0.0;
    g.Y1 = std::abs(1.0 / wave.V);
    g.nx = nx;
    g.ny = ny;
    return g;
}

void GridSpec::validate() const
{
    if (nx < 8 || ny < 8) {
        throw InvalidArgument("GridSpec: at least 8 points per direction");
    }
    if (!(X1 > X0) || !(Y1 > Y0) || !std::isfinite(X1 - X0) || !std::isfinite(Y1 - Y0)) {
        throw InvalidArgument("GridSpec: ranges must be finite and non-empty");
    }
}

Complex u_hat(double X, double Y, const WaveData &wave, const ThetaParams &params, int dX_order,
              int dY_order)
{
    if (dX_order < 0 || dY_order < 0 || dX_order > 4 || dY_order > 2 || dX_order + dY_order > 4) {
        throw InvalidArgument("u_hat: derivative orders must satisfy a <= 4, b <= 2, a + b <= 4");
    }
    const Complex w = phase(X, Y, wave);
    const int top = 2 + dX_order + dY_order;
    std::array<Complex, max_theta_order + 1> d{};
    for (int k = 0; k <= top; ++k) {
        d[k] = theta(w, params, k);
    }
    const double scale = std::max(1.0, std::exp(pi * w.imag() * w.imag() / params.tau.imag()));
    if (std::abs(d[0]) < 1e-12 * scale) {
        throw ThetaDivisorProximity("u_hat: the phase lies on the theta divisor");
    }
    const auto kappa = log_derivatives(d, top);
    Complex value = 2.0 * std::pow(wave.U, 2 + dX_order) * std::pow(wave.V, dY_order) * kappa[top];
    if (dX_order == 0 && dY_order == 0) {
        value += wave.c.value_or(Complex{0.0, 0.0});
    }
    return value;
}

std::vector<GridSample> sample_grid(const WaveData &wave, const ThetaParams &params,
                                    const GridSpec &grid)
{
    grid.validate();
    std::vector<Complex> z;
    z.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            z.push_back(phase(grid.X(i), grid.Y(j), wave));
        }
    }
    const ThetaBatch batch = theta_batch(z, params);

    double max_theta = 0.0;
    for (const Complex &t : batch.derivatives[0]) {
        max_theta = std::max(max_theta, std::abs(t));
    }
    const Complex U2 = wave.U * wave.U;
    std::vector<GridSample> out(z.size());
    for (std::size_t p = 0; p < z.size(); ++p) {
        GridSample &s = out[p];
        s.X = grid.X(static_cast<int>(p % grid.nx));
        s.Y = grid.Y(static_cast<int>(p / grid.nx));
        s.theta = batch.derivatives[0][p];
        s.near_divisor = std::abs(s.theta) < divisor_fraction * max_theta;
        if (s.near_divisor) {
            continue;
        }
        std::array<Complex, max_theta_order + 1> d{};
        for (int k = 0; k <= max_theta_order; ++k) {
            d[k] = batch.derivatives[k][p];
        }
        const auto kappa = log_derivatives(d, max_theta_order);
        s.u = 2.0 * U2 * kappa[2];
        s.u_X = 2.0 * U2 * wave.U * kappa[3];
        s.u_XX = 2.0 * U2 * U2 * kappa[4];
        s.u_XXXX = 2.0 * U2 * U2 * U2 * kappa[6];
        s.u_YY = 2.0 * U2 * wave.V * wave.V * kappa[4];
    }
    return out;
}

CFit solve_c(const WaveData &wave, const ThetaParams &params, const GridSpec &grid)
{
    const auto samples = sample_grid(wave, params, grid);
    Complex num{};
    double den = 0.0;
    double max_g = 0.0;
    double max_term = 0.0;
    std::vector<std::pair<Complex, Complex>> pairs; // (R0, g)
    for (const GridSample &s : samples) {
        if (s.near_divisor) {
            continue;
        }
        const Complex R0 = 3.0 * s.u_YY + 6.0 * s.u_X * s.u_X + 6.0 * s.u * s.u_XX + s.u_XXXX;
        const Complex g = 6.0 * s.u_XX;
        num += std::conj(g) * R0;
        den += std::norm(g);
        max_g = std::max(max_g, std::abs(g));
        max_term = std::max({max_term, std::abs(3.0 * s.u_YY), std::abs(s.u_XXXX),
                             std::abs(6.0 * s.u_X * s.u_X)});
        pairs.emplace_back(R0, g);
    }
    if (pairs.empty() || !(max_g > 1e-10 * max_term)) {
        throw IllConditioned("solve_c: u_XX vanishes on the grid, c is not determined");
    }
    CFit fit;
    fit.c = -num / den;
    const double denom = std::max(std::abs(fit.c), std::norm(wave.U));
    for (const auto &[R0, g] : pairs) {
        if (std::abs(g) < 0.1 * max_g) {
            continue;
        }
        fit.spread = std::max(fit.spread, std::abs(-R0 / g - fit.c) / denom);
        ++fit.points_used;
    }
    return fit;
}

ResidualReport boussinesq_residual(const WaveData &wave, const ThetaParams &params,
                                   const GridSpec &grid)
{
    if (!wave.c) {
        throw InvalidArgument("boussinesq_residual: the constant c has not been solved");
    }
    ResidualReport report;
    report.samples = sample_grid(wave, params, grid);
    report.relative.reserve(report.samples.size());
    for (GridSample &s : report.samples) {
        if (s.near_divisor) {
            ++report.excluded_points;
            report.relative.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        s.u += *wave.c;
        const Complex t1 = 3.0 * s.u_YY;
        const Complex t2 = 6.0 * s.u_X * s.u_X;
        const Complex t3 = 6.0 * s.u * s.u_XX;
        const Complex t4 = s.u_XXXX;
        const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
        const double r = std::abs(t1 + t2 + t3 + t4) / scale;
        report.relative.push_back(r);
        report.max_relative = std::max(report.max_relative, r);
    }
    return report;
}

LatticeCheck periodicity_lattice_check(const WaveData &wave, double T, LatticeDirection direction)
{
    if (!(T > 0.0)) {
        throw InvalidArgument("periodicity_lattice_check: T must be positive");
    }
    LatticeCheck out;
    out.shift = T * (direction == LatticeDirection::X ? wave.U : wave.V);
    const double n = out.shift.imag() / wave.tau.imag();
    const double m = out.shift.real() - n * wave.tau.real();
    out.n = std::lround(n);
    out.m = std::lround(m);
    out.distance = std::abs(out.shift - (static_cast<double>(out.m) + static_cast<double>(out.n) * wave.tau));
    out.on_lattice = out.distance < 1e-8;
    return out;
}

EffectivizationReport effectivization_diagnostic(const WaveData &wave, const ThetaParams &params)
{
    if (std::abs(wave.U) == 0.0) {
        throw InvalidArgument("effectivization_diagnostic: U must be nonzero");
    }
    EffectivizationReport r;
    r.theta1_ratio = theta1(0.0, params, 3) / theta1(0.0, params, 1);
    const Complex prefactor = 4.0 * pi * I_unit * std::sqrt(3.0) / 3.0;
    r.rho_plus = wave.V / (prefactor * wave.U * wave.U * std::sqrt(r.theta1_ratio));
    r.rho_minus = -r.rho_plus;
    return r;
}

} // namespace isoperiodic
