#ifndef ISOPERIODIC_BELL_HPP
#define ISOPERIODIC_BELL_HPP

#include "isoperiodic/numerics.hpp"

#include <vector>

namespace isoperiodic
{

// Sigma_k = (-y0)^-k + (1 - y0)^-k + (x - y0)^-k for k = 1..N.
// values[k] holds Sigma_k; values[0] is the number of branch points (3).
struct SigmaVector {
    std::vector<Complex> values;
    Complex x;
    Complex y0;

    int size() const noexcept { return static_cast<int>(values.size()) - 1; }
    Complex operator[](int k) const { return values.at(static_cast<std::size_t>(k)); }
};

// L_0..L_N, the Bell-type polynomials in -Sigma_1, ..., -Sigma_l. They are
// the ratios d^l omega(Q0)/dy0^l / omega(Q0).
struct BellTable {
    std::vector<Complex> values;
    SigmaVector sigma;

    int size() const noexcept { return static_cast<int>(values.size()) - 1; }
    Complex operator[](int l) const { return values.at(static_cast<std::size_t>(l)); }
};

inline constexpr int max_explicit_order = 12;

// Throws PoleAtRamification when y0 is within 1e-8 of {0, 1, x}.
SigmaVector sigma_vector(Complex x, Complex y0, int N);

// A SigmaVector from raw values Sigma_1..Sigma_N (no curve behind it).
SigmaVector sigma_from_values(std::vector<Complex> sigma_1_to_N);

// L_{n+1} = sum_{k=0}^{n} n! / (2 (n-k)!) L_{n-k} Sigma_{k+1}.
BellTable bell_table_recursive(const SigmaVector &sigma, int N);

// Explicit sum over partitions p_1 + 2 p_2 + ... + l p_l = l of
// l! prod Sigma_k^{p_k} / (2^{sum p_k} prod p_k! prod k^{p_k}).
// Throws PartitionBoundExceeded for l > 12.
Complex bell_explicit(int l, const SigmaVector &sigma);

// D_n = sum_{k=0}^{n} n!/(n-k)! L_{n-k} / (x - y0)^{k+1}: the n-th y0-derivative
// of omega(Q0)/(x - y0) divided by omega(Q0). Throws PoleCollision at y0 = x.
Complex ratio_derivative(int n, Complex x, Complex y0, const BellTable &bell);

// Bell quantities for a point: Sigma_1..Sigma_N and L_0..L_N.
BellTable bell_table(Complex x, Complex y0, int N);

} // namespace isoperiodic

#endif
