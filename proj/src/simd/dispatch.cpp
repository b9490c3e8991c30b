#include <atomic>
#include <stdexcept>
#include <string>

#include "tables.hpp"

namespace acop::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(ACOP_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return &detail::scalar_table();
        case Isa::avx2:
#if defined(ACOP_HAVE_AVX2_KERNELS)
            return cpu_has_avx2() ? &detail::avx2_table() : nullptr;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::atomic<const KernelTable*>& active() noexcept {
    static std::atomic<const KernelTable*> table{table_for(best_available_isa())};
    return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool is_supported(Isa isa) noexcept { return table_for(isa) != nullptr; }

Isa best_available_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_acquire); }

const KernelTable& kernels_for(Isa isa) {
    const KernelTable* t = table_for(isa);
    if (t == nullptr) {
        throw std::invalid_argument("kernel ISA '" + std::string(to_string(isa)) + "' is not available on this CPU");
    }
    return *t;
}

void set_active_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

Isa active_isa() noexcept { return kernels().isa; }

}  // namespace acop::simd
