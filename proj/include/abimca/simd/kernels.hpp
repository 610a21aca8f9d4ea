#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace abimca::simd {

/// Data-parallel inner loops shared by the metrics, k-means and the autoencoder.
/// Every backend implements the same table; the scalar one is the reference.
struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// out[j] = sum_f (points[f * stride + j] - query[f])^2 for j < m.
    /// `points` is feature-major (structure of arrays).
    void (*squared_distances_soa)(const double* query, std::size_t dims, const double* points,
                                  std::size_t stride, std::size_t m, double* out);
    void (*sqrt_inplace)(double* x, std::size_t n);
};

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

/// Backends compiled in and supported by the running CPU, scalar first.
std::vector<Backend> available_backends();

/// Table for a specific backend, or nullptr when unavailable.
const KernelTable* table_for(Backend b) noexcept;

/// The backend in use. Chosen on first call: the ABIMCA_SIMD environment
/// variable ("scalar", "avx2", "neon") if set and available, otherwise the
/// widest available backend.
Backend active_backend();
const KernelTable& active();

/// Throws std::invalid_argument when `b` is not available.
void set_backend(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(ABIMCA_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(ABIMCA_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace abimca::simd
