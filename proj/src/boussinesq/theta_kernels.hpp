#ifndef ISOPERIODIC_THETA_KERNELS_HPP
#define ISOPERIODIC_THETA_KERNELS_HPP

#include "isoperiodic/theta.hpp"

namespace isoperiodic::detail
{

// Both kernels fill batch.derivatives[0..6] (already sized to z.size()).
void theta_batch_scalar(std::span<const Complex> z, const ThetaParams &params, ThetaBatch &batch);
void theta_batch_avx2(std::span<const Complex> z, const ThetaParams &params, ThetaBatch &batch);

} // namespace isoperiodic::detail

#endif
