#ifndef ISOPERIODIC_THETA_HPP
#define ISOPERIODIC_THETA_HPP

#include "isoperiodic/numerics.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace isoperiodic
{

inline constexpr int max_theta_order = 6;

// theta(z | tau) = sum_m exp(pi i m^2 tau + 2 pi i m z), truncated at
// |m| <= term_bound.
struct ThetaParams {
    Complex tau;
    int term_bound = 8;

    // Smallest bound >= 8 whose tail, weighted for derivatives up to order 6,
    // is below 1e-16. Throws InvalidArgument unless Im(tau) > 0.
    static ThetaParams for_tau(Complex tau);
    void validate() const;
};

// d^order/dz^order theta(z | tau), order in [0, 6]. Throws
// TruncationInsufficient when the first omitted terms exceed 1e-14 |result|.
Complex theta(Complex z, const ThetaParams &params, int order = 0);

// Odd theta function -sum exp(pi i (m+1/2)^2 tau + 2 pi i (m+1/2)(z+1/2)) and
// its z-derivatives, order in [0, 3].
Complex theta1(Complex z, const ThetaParams &params, int order = 0);

// theta and its z-derivatives of orders 0..6 at many points, structure of
// arrays: derivatives[k][i] is the k-th derivative at z[i].
struct ThetaBatch {
    std::array<std::vector<Complex>, max_theta_order + 1> derivatives;
};

enum class ThetaKernel { scalar, avx2 };

// True when the CPU supports AVX2 and FMA.
bool avx2_available() noexcept;

// Kernel used by theta_batch: AVX2 when available unless overridden.
ThetaKernel active_theta_kernel() noexcept;
// Forces a kernel (std::nullopt restores automatic selection). Requesting
// avx2 on a CPU without it throws InvalidArgument.
void set_theta_kernel_override(std::optional<ThetaKernel> kernel);

ThetaBatch theta_batch(std::span<const Complex> z, const ThetaParams &params);
ThetaBatch theta_batch(std::span<const Complex> z, const ThetaParams &params, ThetaKernel kernel);

} // namespace isoperiodic

#endif
