#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace modopo {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The output
/// block is a pure function of (key, counter), so each trajectory gets an
/// independent, reproducible stream regardless of scheduling.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Stream of standard normal variates for one (seed, stream id) pair.
/// Counter layout: {block index lo, block index hi, stream lo, stream hi};
/// key = seed. Each block yields two Box-Muller pairs.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    double operator()() noexcept
    {
        if (cursor_ == 4) {
            refill();
        }
        return cache_[cursor_++];
    }

    [[nodiscard]] std::uint64_t blocks_used() const noexcept { return block_; }

private:
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept
    {
        // 53 random bits mapped to (0, 1].
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    void refill() noexcept
    {
        const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                    static_cast<std::uint32_t>(stream_),
                                    static_cast<std::uint32_t>(stream_ >> 32)};
        ++block_;
        const auto r = Philox4x32::generate(ctr, key_);
        const double u1 = to_open_unit(r[0], r[1]);
        const double u2 = to_open_unit(r[2], r[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cache_[0] = radius * std::cos(angle);
        cache_[1] = radius * std::sin(angle);
        // second pair from the next block keeps one uniform pair per Box-Muller draw
        const Philox4x32::Block ctr2{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                     static_cast<std::uint32_t>(stream_),
                                     static_cast<std::uint32_t>(stream_ >> 32)};
        ++block_;
        const auto s = Philox4x32::generate(ctr2, key_);
        const double v1 = to_open_unit(s[0], s[1]);
        const double v2 = to_open_unit(s[2], s[3]);
        const double radius2 = std::sqrt(-2.0 * std::log(v1));
        const double angle2 = 2.0 * std::numbers::pi * v2;
        cache_[2] = radius2 * std::cos(angle2);
        cache_[3] = radius2 * std::sin(angle2);
        cursor_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<double, 4> cache_{};
    int cursor_ = 4;
};

}  // namespace modopo
