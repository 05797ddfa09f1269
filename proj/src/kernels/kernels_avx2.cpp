// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "gk/kernels.hpp"

namespace gk::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void matvec_avx2(const double* a, std::size_t n, const double* x, double* y) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 8 <= n; k += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k), _mm256_loadu_pd(x + k), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k + 4), _mm256_loadu_pd(x + k + 4), acc1);
        }
        for (; k + 4 <= n; k += 4)
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k), _mm256_loadu_pd(x + k), acc0);
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; k < n; ++k) acc = std::fma(row[k], x[k], acc);
        y[r] = acc;
    }
}

void coupling_sums_avx2(const double* a, std::size_t n, const double* s, const double* c, double* as,
                        double* ac) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        __m256d acc_s = _mm256_setzero_pd();
        __m256d acc_c = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            const __m256d w = _mm256_loadu_pd(row + k);
            acc_s = _mm256_fmadd_pd(w, _mm256_loadu_pd(s + k), acc_s);
            acc_c = _mm256_fmadd_pd(w, _mm256_loadu_pd(c + k), acc_c);
        }
        double sum_s = hsum(acc_s);
        double sum_c = hsum(acc_c);
        for (; k < n; ++k) {
            sum_s = std::fma(row[k], s[k], sum_s);
            sum_c = std::fma(row[k], c[k], sum_c);
        }
        as[r] = sum_s;
        ac[r] = sum_c;
    }
}

// Entry (r,k) is computed as scale*a*fma(c_r, c_k, s_r*s_k) in both the
// vector body and the tail, so J[r][k] == J[k][r] bit for bit.
void jacobian_fill_avx2(const double* a, std::size_t n, const double* s, const double* c, double scale,
                        double* j) {
    const __m256d vscale = _mm256_set1_pd(scale);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        double* out = j + r * n;
        const __m256d cr = _mm256_set1_pd(c[r]);
        const __m256d sr = _mm256_set1_pd(s[r]);
        __m256d acc = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            const __m256d ss = _mm256_mul_pd(sr, _mm256_loadu_pd(s + k));
            const __m256d cosdiff = _mm256_fmadd_pd(cr, _mm256_loadu_pd(c + k), ss);
            const __m256d v = _mm256_mul_pd(_mm256_mul_pd(vscale, _mm256_loadu_pd(row + k)), cosdiff);
            _mm256_storeu_pd(out + k, v);
            acc = _mm256_add_pd(acc, v);
        }
        double sum = hsum(acc);
        for (; k < n; ++k) {
            const double v = scale * row[k] * std::fma(c[r], c[k], s[r] * s[k]);
            out[k] = v;
            sum += v;
        }
        // The diagonal slipped into the sum above; remove it before negating.
        sum -= out[r];
        out[r] = -sum;
    }
}

constexpr KernelTable kAvx2{matvec_avx2, coupling_sums_avx2, jacobian_fill_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace gk::kernels
