#include "cevsim/kernels.hpp"

#include <cstdlib>
#include <string>

namespace cevsim {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool avx2_compiled() {
#if defined(CEVSIM_HAVE_AVX2)
    return true;
#else
    return false;
#endif
}

}  // namespace

const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::scalar: return "scalar";
        case KernelKind::avx2: return "avx2";
    }
    return "unknown";
}

bool kernel_available(KernelKind kind) {
    switch (kind) {
        case KernelKind::scalar: return true;
        case KernelKind::avx2: return avx2_compiled() && cpu_has_avx2();
    }
    return false;
}

KernelKind select_kernel() {
    if (const char* env = std::getenv("CEVSIM_KERNEL")) {
        const std::string want(env);
        if (want == "scalar") return KernelKind::scalar;
        if (want == "avx2" && kernel_available(KernelKind::avx2)) return KernelKind::avx2;
    }
    return kernel_available(KernelKind::avx2) ? KernelKind::avx2 : KernelKind::scalar;
}

BatchFn kernel_fn(KernelKind kind) {
    if (kind == KernelKind::avx2 && kernel_available(KernelKind::avx2)) {
        return &run_batch_avx2;
    }
    return &run_batch_scalar;
}

}  // namespace cevsim
