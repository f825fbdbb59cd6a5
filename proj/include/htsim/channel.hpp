#pragma once

#include <cstdint>
#include <span>

#include "htsim/bits.hpp"

namespace htsim {

// Memoryless binary symmetric channel.
struct ChannelModel {
    double flip_prob = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-bit flip decisions for a stream of length n; bit i flips iff
// uniform01() < flip_prob on the i-th draw of the model's generator.
BitVector flip_mask(std::size_t n, const ChannelModel& model);

BitVector apply_channel(std::span<const Bit> bitstream, const ChannelModel& model);

} // namespace htsim
