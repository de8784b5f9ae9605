#include "smlmc/random.hpp"

#include <cmath>
#include <numbers>

namespace smlmc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t sample_id,
                           std::uint64_t retry_index) noexcept {
    // Two independent lanes of a chained finalizer give the 128-bit identity.
    std::uint64_t lane_a = mix64(master_seed + 0x9E3779B97F4A7C15ull);
    lane_a = mix64(lane_a ^ (sample_id * 0xD6E8FEB86659FD93ull));
    lane_a = mix64(lane_a ^ (retry_index + 0xA0761D6478BD642Full));

    std::uint64_t lane_b = mix64(master_seed ^ 0x2545F4914F6CDD1Dull);
    lane_b = mix64(lane_b + sample_id + 0x8EBC6AF09C88C6E3ull);
    lane_b = mix64(lane_b ^ (retry_index * 0x589965CC75374CC3ull));
    lane_b = mix64(lane_b ^ lane_a);

    key_ = {static_cast<std::uint32_t>(lane_a),
            static_cast<std::uint32_t>(lane_a >> 32)};
    ctr_hi_lo_ = static_cast<std::uint32_t>(lane_b);
    ctr_hi_hi_ = static_cast<std::uint32_t>(lane_b >> 32);
}

void RandomStream::refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  ctr_hi_lo_, ctr_hi_hi_};
    buf_ = Philox4x32::block(ctr, key_);
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RandomStream::next_u64() noexcept {
    if (buf_pos_ >= 4) refill();
    const std::uint64_t lo = buf_[buf_pos_];
    const std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double mean) noexcept {
    return -mean * std::log1p(-uniform());
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::int64_t RandomStream::poisson(double lambda) noexcept {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) {
        const double limit = std::exp(-lambda);
        std::int64_t k = 0;
        double product = uniform();
        while (product > limit) {
            ++k;
            product *= uniform();
        }
        return k;
    }
    // Transformed rejection with squeeze (Hormann, PTRS).
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace smlmc
