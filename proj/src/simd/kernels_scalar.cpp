#include "abimca/simd/kernels.hpp"

#include <cmath>

namespace abimca::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = a[i] - b[i];
        sum += t * t;
    }
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void squared_distances_soa_scalar(const double* query, std::size_t dims, const double* points,
                                  std::size_t stride, std::size_t m, double* out) {
    for (std::size_t j = 0; j < m; ++j) out[j] = 0.0;
    for (std::size_t f = 0; f < dims; ++f) {
        const double q = query[f];
        const double* row = points + f * stride;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = row[j] - q;
            out[j] += t * t;
        }
    }
}

void sqrt_inplace_scalar(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sqrt(x[i]);
}

}  // namespace

const KernelTable scalar_table{dot_scalar, squared_distance_scalar, axpy_scalar,
                               squared_distances_soa_scalar, sqrt_inplace_scalar};

}  // namespace abimca::simd::detail
