// AVX2 + FMA variants of the kernel table. This translation unit is the only
// one compiled with -mavx2 -mfma; it must not include headers whose inline
// functions are also instantiated by the portable translation units.

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>

#include "../k1_chebyshev.hpp"
#include "tables.hpp"

namespace acop::simd {

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// 2^k for integral k in [-1022, 1023] held in a double lane.
inline __m256d pow2_pd(__m256d k) {
    const __m256d magic = set1(0x1.8p52);
    const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
    return _mm256_castsi256_pd(bits);
}

// Natural log for positive, normal, finite lanes.
inline __m256d log_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
    const __m256d two52 = set1(4503599627370496.0);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(two52))),
                              set1(4503599627370496.0 + 1023.0));
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    const __m256d big = _mm256_cmp_pd(m, set1(std::numbers::sqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

    const __m256d one = set1(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s2 = _mm256_mul_pd(s, s);
    // log m = 2 atanh(s) = 2 s sum_k s^{2k} / (2k + 1)
    __m256d poly = set1(1.0 / 23.0);
    for (int k = 10; k >= 0; --k) {
        poly = _mm256_fmadd_pd(poly, s2, set1(1.0 / (2.0 * k + 1.0)));
    }
    const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(s, s), poly);

    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    return _mm256_fmadd_pd(e, set1(ln2_hi), _mm256_fmadd_pd(e, set1(ln2_lo), log_m));
}

inline __m256d exp_pd(__m256d x) {
    const __m256d underflow = _mm256_cmp_pd(x, set1(-745.2), _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, set1(-745.2)), set1(709.78));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, set1(std::numbers::log2e)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    __m256d r = _mm256_fnmadd_pd(n, set1(ln2_hi), x);
    r = _mm256_fnmadd_pd(n, set1(ln2_lo), r);

    // Taylor polynomial to degree 13, |r| <= ln2 / 2.
    __m256d p = set1(1.0 / 6227020800.0);
    constexpr std::array<double, 13> inv_fact{1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
                                              1.0 / 362880.0,    1.0 / 40320.0,    1.0 / 5040.0,
                                              1.0 / 720.0,       1.0 / 120.0,      1.0 / 24.0,
                                              1.0 / 6.0,         0.5,              1.0,
                                              1.0};
    for (double c : inv_fact) p = _mm256_fmadd_pd(p, r, set1(c));

    const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, set1(0.5)));
    const __m256d n2 = _mm256_sub_pd(n, n1);
    const __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2_pd(n1)), pow2_pd(n2));
    return _mm256_andnot_pd(underflow, result);
}

template <std::size_t N>
inline __m256d chebyshev_pd(const std::array<double, N>& c, __m256d t) {
    const __m256d t2 = _mm256_add_pd(t, t);
    __m256d b1 = _mm256_setzero_pd();
    __m256d b2 = _mm256_setzero_pd();
    for (std::size_t k = N - 1; k >= 1; --k) {
        const __m256d b0 = _mm256_fmadd_pd(t2, b1, _mm256_sub_pd(set1(c[k]), b2));
        b2 = b1;
        b1 = b0;
    }
    return _mm256_fmadd_pd(t, b1, _mm256_sub_pd(set1(c[0]), b2));
}

inline __m256d log_k1_pd(__m256d z) {
    const __m256d split = set1(2.0);
    const __m256d small = _mm256_cmp_pd(z, split, _CMP_LE_OQ);
    const int small_bits = _mm256_movemask_pd(small);

    __m256d small_val = _mm256_setzero_pd();
    __m256d large_val = _mm256_setzero_pd();
    if (small_bits != 0) {
        const __m256d zs = _mm256_min_pd(z, split);
        const __m256d t = _mm256_fmsub_pd(_mm256_mul_pd(set1(0.5), zs), zs, set1(1.0));
        const __m256d i1x = chebyshev_pd(acop::detail::kK1SmallI1, t);
        const __m256d rest = chebyshev_pd(acop::detail::kK1SmallRest, t);
        const __m256d k1 = _mm256_fmadd_pd(_mm256_mul_pd(log_pd(_mm256_mul_pd(set1(0.5), zs)), zs), i1x,
                                           _mm256_div_pd(rest, zs));
        small_val = log_pd(k1);
    }
    if (small_bits != 0xF) {
        const __m256d zl = _mm256_max_pd(z, split);
        const __m256d g = chebyshev_pd(acop::detail::kK1LargeScaled, _mm256_sub_pd(_mm256_div_pd(set1(4.0), zl), set1(1.0)));
        large_val = _mm256_sub_pd(_mm256_fnmadd_pd(set1(0.5), log_pd(zl), log_pd(g)), zl);
    }
    return _mm256_blendv_pd(large_val, small_val, small);
}

inline __m256d nig_log_pdf_pd(const NigKernelParams& p, __m256d x) {
    const __m256d d = _mm256_sub_pd(x, set1(p.mu));
    const __m256d abs_d = _mm256_andnot_pd(set1(-0.0), d);
    const __m256d delta = set1(p.delta);
    const __m256d hi = _mm256_max_pd(abs_d, delta);
    const __m256d lo = _mm256_min_pd(abs_d, delta);
    const __m256d q = _mm256_div_pd(lo, hi);
    const __m256d r = _mm256_mul_pd(hi, _mm256_sqrt_pd(_mm256_fmadd_pd(q, q, set1(1.0))));
    const __m256d base = _mm256_fmadd_pd(set1(p.beta), d, set1(p.log_norm));
    return _mm256_add_pd(_mm256_sub_pd(base, log_pd(r)), log_k1_pd(_mm256_mul_pd(set1(p.alpha), r)));
}

// Applies `op` to full vectors and to a zero-padded remainder.
template <class Op>
inline void map_pd(std::span<const double> x, std::span<double> out, double pad, Op op) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out.data() + i, op(_mm256_loadu_pd(x.data() + i)));
    }
    if (i < n) {
        alignas(32) double buf[4] = {pad, pad, pad, pad};
        std::memcpy(buf, x.data() + i, (n - i) * sizeof(double));
        alignas(32) double res[4];
        _mm256_store_pd(res, op(_mm256_load_pd(buf)));
        std::memcpy(out.data() + i, res, (n - i) * sizeof(double));
    }
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void log_bessel_k1(std::span<const double> x, std::span<double> out) {
    map_pd(x, out, 1.0, [](__m256d v) { return log_k1_pd(v); });
}

void nig_log_pdf(const NigKernelParams& p, std::span<const double> x, std::span<double> out) {
    map_pd(x, out, p.mu, [&p](__m256d v) { return nig_log_pdf_pd(p, v); });
}

void nig_pdf(const NigKernelParams& p, std::span<const double> x, std::span<double> out) {
    map_pd(x, out, p.mu, [&p](__m256d v) { return exp_pd(nig_log_pdf_pd(p, v)); });
}

double nig_log_likelihood(const NigKernelParams& p, std::span<const double> x) {
    const std::size_t n = x.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, nig_log_pdf_pd(p, _mm256_loadu_pd(x.data() + i)));
    }
    if (i < n) {
        alignas(32) double buf[4] = {p.mu, p.mu, p.mu, p.mu};
        std::memcpy(buf, x.data() + i, (n - i) * sizeof(double));
        alignas(32) double res[4];
        _mm256_store_pd(res, nig_log_pdf_pd(p, _mm256_load_pd(buf)));
        for (std::size_t j = 0; j < n - i; ++j) acc = _mm256_add_pd(acc, _mm256_set_pd(0, 0, 0, res[j]));
    }
    return hsum(acc);
}

CentralSums central_sums(std::span<const double> x, double center) {
    const std::size_t n = x.size();
    const __m256d c = set1(center);
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    __m256d a4 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), c);
        const __m256d d2 = _mm256_mul_pd(d, d);
        a2 = _mm256_add_pd(a2, d2);
        a3 = _mm256_fmadd_pd(d2, d, a3);
        a4 = _mm256_fmadd_pd(d2, d2, a4);
    }
    CentralSums s{hsum(a2), hsum(a3), hsum(a4)};
    for (; i < n; ++i) {
        const double d = x[i] - center;
        const double d2 = d * d;
        s.s2 += d2;
        s.s3 += d2 * d;
        s.s4 += d2 * d2;
    }
    return s;
}

JointTailCounts joint_tail_counts(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2,
                                  std::int32_t k) {
    const std::size_t n = r1.size();
    const __m256i kv = _mm256_set1_epi32(k);
    JointTailCounts c;
    std::size_t i = 0;
    while (i + 8 <= n) {
        // int32 lane accumulators: flush well before they could overflow.
        const std::size_t block_end = std::min(n - (n - i) % 8, i + (std::size_t{1} << 30));
        __m256i lower = _mm256_setzero_si256();
        __m256i upper = _mm256_setzero_si256();
        for (; i < block_end; i += 8) {
            const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r1.data() + i));
            const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(r2.data() + i));
            const __m256i ga = _mm256_cmpgt_epi32(a, kv);
            const __m256i gb = _mm256_cmpgt_epi32(b, kv);
            upper = _mm256_sub_epi32(upper, _mm256_and_si256(ga, gb));
            lower = _mm256_sub_epi32(lower, _mm256_andnot_si256(_mm256_or_si256(ga, gb), _mm256_set1_epi32(-1)));
        }
        alignas(32) std::int32_t lo[8];
        alignas(32) std::int32_t up[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lo), lower);
        _mm256_store_si256(reinterpret_cast<__m256i*>(up), upper);
        for (int j = 0; j < 8; ++j) {
            c.lower += static_cast<std::size_t>(lo[j]);
            c.upper += static_cast<std::size_t>(up[j]);
        }
    }
    for (; i < n; ++i) {
        c.lower += (r1[i] <= k && r2[i] <= k) ? 1 : 0;
        c.upper += (r1[i] > k && r2[i] > k) ? 1 : 0;
    }
    return c;
}

constexpr KernelTable kAvx2Table{
    Isa::avx2, &log_bessel_k1, &nig_log_pdf, &nig_pdf, &nig_log_likelihood, &central_sums, &joint_tail_counts,
};

}  // namespace

namespace detail {
const KernelTable& avx2_table() noexcept { return kAvx2Table; }
}  // namespace detail

}  // namespace acop::simd
