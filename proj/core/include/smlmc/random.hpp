#pragma once

#include <array>
#include <cstdint>

namespace smlmc {

/// Counter-based Philox4x32-10 block function.
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. The
/// output depends only on (counter, key), so any block of any stream can be
/// produced independently of every other block.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// 64-bit finalizer (SplitMix64 / MurmurHash3 fmix64 constants).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic random stream for one simulated sample.
///
/// The 128-bit stream identity is derived from (master_seed, sample_id,
/// retry_index); half of it keys the Philox function and the other half fills
/// the upper counter words. Draws consume the lower 64-bit block counter in
/// order, so the sequence is a pure function of the identity and the number
/// of values already drawn.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t sample_id,
                 std::uint64_t retry_index = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Exponential with the given mean (inverse transform).
    double exponential(double mean) noexcept;

    /// Standard normal (Box-Muller, both outputs used in turn).
    double normal() noexcept;

    /// Poisson with mean lambda. Inversion below lambda = 10, PTRS above.
    std::int64_t poisson(double lambda) noexcept;

    std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
    void refill() noexcept;

    Philox4x32::Key key_{};
    std::uint32_t ctr_hi_lo_ = 0;
    std::uint32_t ctr_hi_hi_ = 0;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buf_{};
    int buf_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace smlmc
