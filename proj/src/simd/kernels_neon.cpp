// AArch64 only; NEON is part of the base ISA there, so no runtime probe is needed.
#include "abimca/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace abimca::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, t, t);
    }
    double sum = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double t = a[i] - b[i];
        sum += t * t;
    }
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void squared_distances_soa_neon(const double* query, std::size_t dims, const double* points,
                                std::size_t stride, std::size_t m, double* out) {
    std::size_t j = 0;
    for (; j + 2 <= m; j += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t f = 0; f < dims; ++f) {
            const float64x2_t t = vsubq_f64(vld1q_f64(points + f * stride + j), vdupq_n_f64(query[f]));
            acc = vfmaq_f64(acc, t, t);
        }
        vst1q_f64(out + j, acc);
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

void sqrt_inplace_neon(double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vsqrtq_f64(vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] = std::sqrt(x[i]);
}

}  // namespace

const KernelTable neon_table{dot_neon, squared_distance_neon, axpy_neon, squared_distances_soa_neon,
                             sqrt_inplace_neon};

}  // namespace abimca::simd::detail
