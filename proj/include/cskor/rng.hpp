#pragma once

#include <array>
#include <cstdint>

namespace cskor {

/// Counter-based Philox4x32-10 block cipher used as a splittable RNG.
/// Streams are addressed by (seed, stream) so parallel consumers get
/// non-overlapping, scheduling-independent sequences.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /// Next double in (0,1), 53-bit resolution.
    double next_uniform();

    /// Next standard normal (Box-Muller over the counter stream).
    double next_normal();

    /// Raw 10-round Philox4x32 block.
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4; // consumed
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

} // namespace cskor
