#pragma once

#include "acop/simd/kernels.hpp"

namespace acop::simd::detail {

const KernelTable& scalar_table() noexcept;
#if defined(ACOP_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace acop::simd::detail
