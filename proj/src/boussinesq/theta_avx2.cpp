// Four evaluation points per AVX2 register, split into real and imaginary
// lanes. The series term q^(m^2) a^m (a = exp(2 pi i z)) is built from a
// running power of a and precomputed scalars q^(m^2); the terms for m and -m
// share one pass, and the derivative weights (2 pi i m)^k are applied as a
// real power times a quarter rotation.

#include "isoperiodic/theta.hpp"
#include "theta_kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace isoperiodic::detail
{

namespace
{

struct CVec {
    __m256d re;
    __m256d im;
};

inline CVec mul(CVec x, CVec y)
{
    return {_mm256_fmsub_pd(x.re, y.re, _mm256_mul_pd(x.im, y.im)),
            _mm256_fmadd_pd(x.re, y.im, _mm256_mul_pd(x.im, y.re))};
}

inline CVec mul(CVec x, Complex s)
{
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    return {_mm256_fmsub_pd(x.re, sr, _mm256_mul_pd(x.im, si)),
            _mm256_fmadd_pd(x.re, si, _mm256_mul_pd(x.im, sr))};
}

inline CVec add(CVec x, CVec y) { return {_mm256_add_pd(x.re, y.re), _mm256_add_pd(x.im, y.im)}; }
inline CVec sub(CVec x, CVec y) { return {_mm256_sub_pd(x.re, y.re), _mm256_sub_pd(x.im, y.im)}; }

// acc += r * i^k * x
inline void accumulate(CVec &acc, CVec x, double r, int k)
{
    const __m256d rv = _mm256_set1_pd(r);
    switch (k % 4) {
    case 0:
        acc.re = _mm256_fmadd_pd(rv, x.re, acc.re);
        acc.im = _mm256_fmadd_pd(rv, x.im, acc.im);
        break;
    case 1:
        acc.re = _mm256_fnmadd_pd(rv, x.im, acc.re);
        acc.im = _mm256_fmadd_pd(rv, x.re, acc.im);
        break;
    case 2:
        acc.re = _mm256_fnmadd_pd(rv, x.re, acc.re);
        acc.im = _mm256_fnmadd_pd(rv, x.im, acc.im);
        break;
    default:
        acc.re = _mm256_fmadd_pd(rv, x.im, acc.re);
        acc.im = _mm256_fnmadd_pd(rv, x.re, acc.im);
        break;
    }
}

} // namespace

void theta_batch_avx2(std::span<const Complex> z, const ThetaParams &params, ThetaBatch &batch)
{
    const int M = params.term_bound;
    std::vector<Complex> q_square(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        q_square[m] = std::exp(pi * I_unit * static_cast<double>(m) * static_cast<double>(m)
                               * params.tau);
    }
    constexpr int K = max_theta_order;

    for (std::size_t base = 0; base < z.size(); base += 4) {
        alignas(32) double ar[4], ai[4], br[4], bi[4];
        const std::size_t lanes = std::min<std::size_t>(4, z.size() - base);
        for (std::size_t l = 0; l < 4; ++l) {
            const Complex w = z[base + (l < lanes ? l : 0)];
            const Complex a = std::exp(2.0 * pi * I_unit * w);
            const Complex b = 1.0 / a;
            ar[l] = a.real();
            ai[l] = a.imag();
            br[l] = b.real();
            bi[l] = b.imag();
        }
        const CVec a{_mm256_load_pd(ar), _mm256_load_pd(ai)};
        const CVec b{_mm256_load_pd(br), _mm256_load_pd(bi)};

        CVec acc[K + 1];
        for (auto &c : acc) {
            c = {_mm256_setzero_pd(), _mm256_setzero_pd()};
        }
        acc[0].re = _mm256_set1_pd(1.0);

        CVec a_pow = a;
        CVec b_pow = b;
        for (int m = 1; m <= M; ++m) {
            const CVec plus = mul(a_pow, q_square[m]);
            const CVec minus = mul(b_pow, q_square[m]);
            const CVec even = add(plus, minus);
            const CVec odd = sub(plus, minus);
            const double f = 2.0 * pi * m;
            double r = 1.0;
            for (int k = 0; k <= K; ++k) {
                accumulate(acc[k], (k % 2 == 0) ? even : odd, r, k);
                r *= f;
            }
            a_pow = mul(a_pow, a);
            b_pow = mul(b_pow, b);
        }

        for (int k = 0; k <= K; ++k) {
            alignas(32) double re[4], im[4];
            _mm256_store_pd(re, acc[k].re);
            _mm256_store_pd(im, acc[k].im);
            for (std::size_t l = 0; l < lanes; ++l) {
                batch.derivatives[k][base + l] = Complex{re[l], im[l]};
            }
        }
    }
}

} // namespace isoperiodic::detail
