#include "isoperiodic/errors.hpp"
#include "isoperiodic/theta.hpp"
#include "theta_kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace isoperiodic
{

namespace
{

constexpr double tail_target = 1e-16;
constexpr double truncation_tolerance = 1e-14;

// 0 = automatic, 1 = scalar, 2 = avx2.
std::atomic<int> kernel_override{0};

Complex i_power(int k)
{
    switch (k % 4) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

// Largest first omitted term (both signs of m) of the order-k series.
double tail_estimate(const ThetaParams &p, double abs_im_z, int order, double shift)
{
    const double m = p.term_bound + 1.0 - shift;
    const double log_term = -pi * p.tau.imag() * m * m + 2.0 * pi * m * abs_im_z
                            + order * std::log(2.0 * pi * m);
    return 2.0 * std::exp(log_term);
}

void check_truncation(double tail, double scale)
{
    if (tail > truncation_tolerance * scale) {
        throw TruncationInsufficient("theta: truncated series tail is not negligible; increase "
                                     "term_bound or reduce |Im z|");
    }
}

} // namespace

ThetaParams ThetaParams::for_tau(Complex tau)
{
    if (!(tau.imag() > 0.0)) {
        throw InvalidArgument("ThetaParams: Im(tau) must be positive");
    }
    ThetaParams p{tau, 8};
    while (tail_estimate(p, 0.0, max_theta_order, 0.0) >= tail_target) {
        ++p.term_bound;
    }
    return p;
}

void ThetaParams::validate() const
{
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag())) {
        throw InvalidArgument("ThetaParams: Im(tau) must be positive and finite");
    }
    if (term_bound < 1) {
        throw InvalidArgument("ThetaParams: term_bound must be positive");
    }
}

Complex theta(Complex z, const ThetaParams &params, int order)
{
    params.validate();
    if (order < 0 || order > max_theta_order) {
        throw InvalidArgument("theta: derivative order must lie in [0, 6]");
    }
    Complex sum{};
    double scale = 0.0;
    for (int m = -params.term_bound; m <= params.term_bound; ++m) {
        const Complex term = std::pow(2.0 * pi * m, order) * i_power(order)
                             * std::exp(pi * I_unit * (static_cast<double>(m) * m * params.tau
                                                       + 2.0 * m * z));
        sum += term;
        scale += std::abs(term);
    }
    check_truncation(tail_estimate(params, std::abs(z.imag()), order, 0.0), scale);
    return sum;
}

Complex theta1(Complex z, const ThetaParams &params, int order)
{
    params.validate();
    if (order < 0 || order > 3) {
        throw InvalidArgument("theta1: derivative order must lie in [0, 3]");
    }
    Complex sum{};
    double scale = 0.0;
    for (int m = -params.term_bound - 1; m <= params.term_bound; ++m) {
        const double r = m + 0.5;
        const Complex term = -std::pow(2.0 * pi * r, order) * i_power(order)
                             * std::exp(pi * I_unit * (r * r * params.tau + 2.0 * r * (z + 0.5)));
        sum += term;
        scale += std::abs(term);
    }
    check_truncation(tail_estimate(params, std::abs(z.imag()), order, -0.5), scale);
    return sum;
}

bool avx2_available() noexcept
{
#if !defined(ISOPERIODIC_NO_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

ThetaKernel active_theta_kernel() noexcept
{
    switch (kernel_override.load()) {
    case 1:
        return ThetaKernel::scalar;
    case 2:
        return ThetaKernel::avx2;
    default:
        return avx2_available() ? ThetaKernel::avx2 : ThetaKernel::scalar;
    }
}

void set_theta_kernel_override(std::optional<ThetaKernel> kernel)
{
    if (!kernel) {
        kernel_override.store(0);
        return;
    }
    if (*kernel == ThetaKernel::avx2 && !avx2_available()) {
        throw InvalidArgument("theta kernel: AVX2 is not supported on this CPU");
    }
    kernel_override.store(*kernel == ThetaKernel::scalar ? 1 : 2);
}

ThetaBatch theta_batch(std::span<const Complex> z, const ThetaParams &params)
{
    return theta_batch(z, params, active_theta_kernel());
}

ThetaBatch theta_batch(std::span<const Complex> z, const ThetaParams &params, ThetaKernel kernel)
{
    params.validate();
    if (kernel == ThetaKernel::avx2 && !avx2_available()) {
        throw InvalidArgument("theta_batch: AVX2 is not supported on this CPU");
    }
    double max_im = 0.0;
    for (const Complex &w : z) {
        max_im = std::max(max_im, std::abs(w.imag()));
    }
    // Every series is at least as large as its m = 0 term, which is 1.
    check_truncation(tail_estimate(params, max_im, max_theta_order, 0.0), 1.0);

    ThetaBatch batch;
    for (auto &d : batch.derivatives) {
        d.assign(z.size(), Complex{});
    }
    if (kernel == ThetaKernel::avx2) {
        detail::theta_batch_avx2(z, params, batch);
    } else {
        detail::theta_batch_scalar(z, params, batch);
    }
    return batch;
}

namespace detail
{

void theta_batch_scalar(std::span<const Complex> z, const ThetaParams &params, ThetaBatch &batch)
{
    for (std::size_t i = 0; i < z.size(); ++i) {
        std::array<Complex, max_theta_order + 1> acc{};
        for (int m = -params.term_bound; m <= params.term_bound; ++m) {
            const Complex term = std::exp(pi * I_unit
                                          * (static_cast<double>(m) * m * params.tau + 2.0 * m * z[i]));
            const Complex factor = 2.0 * pi * I_unit * static_cast<double>(m);
            Complex weighted = term;
            for (int k = 0; k <= max_theta_order; ++k) {
                acc[k] += weighted;
                weighted *= factor;
            }
        }
        for (int k = 0; k <= max_theta_order; ++k) {
            batch.derivatives[k][i] = acc[k];
        }
    }
}

#ifdef ISOPERIODIC_NO_AVX2
void theta_batch_avx2(std::span<const Complex> z, const ThetaParams &params, ThetaBatch &batch)
{
    theta_batch_scalar(z, params, batch);
}
#endif

} // namespace detail

} // namespace isoperiodic
