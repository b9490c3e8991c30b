#pragma once

#include <array>
#include <cstdint>

namespace acop {

/// Philox4x32-10 block cipher used as a counter-based generator.
/// Output depends only on (key, counter), so any substream can be addressed
/// directly without sequential state.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block encrypt(Block counter, Key key) noexcept;
};

/// Independent random substream for one simulated path (or other unit of
/// work). Streams with distinct (seed, stream, domain) never share counters.
class RandomStream {
public:
    /// `domain` separates unrelated consumers that reuse the same stream ids
    /// (e.g. copula draws vs. delta-path draws for the same path index).
    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_{};
    std::uint64_t stream_ = 0;
    std::uint32_t domain_ = 0;
    std::uint64_t block_ = 0;
    Philox4x32::Block buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

namespace rng_domain {
inline constexpr std::uint32_t copula_path = 0x434f5055;  // "COPU"
inline constexpr std::uint32_t delta_path = 0x44454c54;   // "DELT"
inline constexpr std::uint32_t fixture = 0x46495854;      // "FIXT"
inline constexpr std::uint32_t oracle = 0x4f52434c;       // "ORCL"
}  // namespace rng_domain

}  // namespace acop
