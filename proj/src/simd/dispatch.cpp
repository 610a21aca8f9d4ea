#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "abimca/simd/kernels.hpp"

namespace abimca::simd {
namespace {

bool cpu_supports(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(ABIMCA_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(ABIMCA_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend pick_initial() {
    if (const char* env = std::getenv("ABIMCA_SIMD")) {
        const std::string want(env);
        for (Backend b : available_backends()) {
            if (backend_name(b) == want) return b;
        }
    }
    return available_backends().back();
}

std::atomic<int> g_active{-1};

}  // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (cpu_supports(b)) out.push_back(b);
    }
    return out;
}

const KernelTable* table_for(Backend b) noexcept {
    if (!cpu_supports(b)) return nullptr;
    switch (b) {
        case Backend::Scalar: return &detail::scalar_table;
#if defined(ABIMCA_HAVE_AVX2)
        case Backend::Avx2: return &detail::avx2_table;
#endif
#if defined(ABIMCA_HAVE_NEON)
        case Backend::Neon: return &detail::neon_table;
#endif
        default: return nullptr;
    }
}

Backend active_backend() {
    int current = g_active.load(std::memory_order_acquire);
    if (current < 0) {
        int fresh = static_cast<int>(pick_initial());
        g_active.compare_exchange_strong(current, fresh, std::memory_order_acq_rel);
        current = g_active.load(std::memory_order_acquire);
    }
    return static_cast<Backend>(current);
}

const KernelTable& active() { return *table_for(active_backend()); }

void set_backend(Backend b) {
    if (!cpu_supports(b)) {
        throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(b)));
    }
    g_active.store(static_cast<int>(b), std::memory_order_release);
}

}  // namespace abimca::simd
