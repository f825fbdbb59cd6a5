#include "htsim/channel.hpp"

#include <string>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"

namespace htsim {

void ChannelModel::validate() const {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
        throw StructuralError("flip_prob must be in [0, 1], got " + std::to_string(flip_prob));
}

BitVector flip_mask(std::size_t n, const ChannelModel& model) {
    model.validate();
    BitVector mask(n, 0);
    if (model.flip_prob == 0.0) return mask;
    Rng rng(model.seed);
    for (auto& m : mask) m = rng.bernoulli(model.flip_prob) ? 1 : 0;
    return mask;
}

BitVector apply_channel(std::span<const Bit> bitstream, const ChannelModel& model) {
    const BitVector mask = flip_mask(bitstream.size(), model);
    BitVector out(bitstream.begin(), bitstream.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= mask[i];
    return out;
}

} // namespace htsim
