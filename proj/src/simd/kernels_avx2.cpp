// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "abimca/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace abimca::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(t, t, acc);
    }
    double sum = hsum(acc);
    for (; i < n; ++i) {
        const double t = a[i] - b[i];
        sum += t * t;
    }
    return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Vectorized over points; features are accumulated in the same order as the
// scalar kernel, so only FMA contraction separates the two results.
void squared_distances_soa_avx2(const double* query, std::size_t dims, const double* points,
                                std::size_t stride, std::size_t m, double* out) {
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t f = 0; f < dims; ++f) {
            const __m256d t =
                _mm256_sub_pd(_mm256_loadu_pd(points + f * stride + j), _mm256_set1_pd(query[f]));
            acc = _mm256_fmadd_pd(t, t, acc);
        }
        _mm256_storeu_pd(out + j, acc);
    }
    for (; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t f = 0; f < dims; ++f) {
            const double t = points[f * stride + j] - query[f];
            acc += t * t;
        }
        out[j] = acc;
    }
}

void sqrt_inplace_avx2(double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] = std::sqrt(x[i]);
}

}  // namespace

const KernelTable avx2_table{dot_avx2, squared_distance_avx2, axpy_avx2, squared_distances_soa_avx2,
                             sqrt_inplace_avx2};

}  // namespace abimca::simd::detail
