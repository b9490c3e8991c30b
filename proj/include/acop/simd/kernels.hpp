#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; wider variants are selected at runtime from the CPU's
// capabilities and must agree with the reference to within rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace acop::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// NIG parameters in the form consumed by the density kernels.
/// `log_norm` is log(delta * alpha / pi) + delta * gamma.
struct NigKernelParams {
    double mu;
    double alpha;
    double beta;
    double delta;
    double log_norm;
};

NigKernelParams make_nig_kernel_params(double mu, double alpha, double beta, double delta) noexcept;

struct CentralSums {
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
};

struct JointTailCounts {
    std::size_t lower = 0;  // #{r1 <= k and r2 <= k}
    std::size_t upper = 0;  // #{r1 >  k and r2 >  k}
};

struct KernelTable {
    Isa isa;
    void (*log_bessel_k1)(std::span<const double> x, std::span<double> out);
    void (*nig_log_pdf)(const NigKernelParams& p, std::span<const double> x, std::span<double> out);
    void (*nig_pdf)(const NigKernelParams& p, std::span<const double> x, std::span<double> out);
    double (*nig_log_likelihood)(const NigKernelParams& p, std::span<const double> x);
    CentralSums (*central_sums)(std::span<const double> x, double center);
    JointTailCounts (*joint_tail_counts)(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2,
                                         std::int32_t k);
};

/// Widest instruction set both compiled in and supported by this CPU.
Isa best_available_isa() noexcept;
bool is_supported(Isa isa) noexcept;

/// Kernel table currently used by the library (defaults to the best ISA).
const KernelTable& kernels() noexcept;

/// Table for a specific ISA; throws std::invalid_argument if unsupported.
const KernelTable& kernels_for(Isa isa);

/// Switch the active table (tests, benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);
Isa active_isa() noexcept;

}  // namespace acop::simd
