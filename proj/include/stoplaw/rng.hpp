#pragma once

#include <array>
#include <cstdint>

namespace stoplaw {

// Philox4x32-10 counter-based generator. Each (seed, stream) pair addresses an
// independent substream, so parallel consumers indexed by stream draw
// identical values regardless of execution order.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            block_ = encrypt(counter_, key_);
            pos_ = 0;
            if (++counter_[0] == 0) ++counter_[1];
        }
        return block_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // uniform on (0, 1): 53-bit mantissa, never exactly 0 or 1
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (pairs cached per generator)
    double next_normal();

    static std::array<std::uint32_t, 4> encrypt(std::array<std::uint32_t, 4> ctr,
                                                std::array<std::uint32_t, 2> key);

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
    double cached_normal_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace stoplaw
