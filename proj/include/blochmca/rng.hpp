#pragma once

#include <array>
#include <cstdint>

namespace blochmca {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (counter, key), so every Monte Carlo path can own an
/// independent substream addressed by its index.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// Standard normal variates for one (seed, stream) pair. Draws are produced
/// two at a time by Box-Muller from one Philox block.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    double next() noexcept;

    /// Uniform on (0, 1) with 52 random bits; never 0 or 1.
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<double, 2> cache_{};
    int cached_ = 0;
};

} // namespace blochmca
