#pragma once

#include <cstdint>
#include <vector>

#include "htsim/bits.hpp"

namespace htsim {

// Two-state Markov source for "plaintext present at the input".
//
// busy_prob is the stationary busy fraction, burst_len_mean the mean length
// of a busy run. The busy->idle hazard is 1/burst_len_mean; the idle->busy
// hazard is chosen so the chain's stationary busy fraction is busy_prob, which
// requires burst_len_mean >= busy_prob / (1 - busy_prob). burst_len_mean =
// 1/(1 - busy_prob) gives i.i.d. Bernoulli cycles.
struct TrafficModel {
    double busy_prob = 0.0;
    double burst_len_mean = 128.0;
    std::uint64_t seed = 0;

    // Throws StructuralError on out-of-range parameters.
    void validate() const;

    double idle_to_busy_prob() const;
    double busy_to_idle_prob() const;
};

// One busy flag per cycle. plaintexts are consumed in order, one block each
// time the host must start a new cipher block.
struct TrafficTrace {
    BitVector busy;
    std::vector<Block128> plaintexts;

    std::size_t size() const noexcept { return busy.size(); }
    std::size_t busy_count() const noexcept;

    static TrafficTrace all_idle(std::size_t n_cycles);
    // Plaintexts drawn from `seed`.
    static TrafficTrace all_busy(std::size_t n_cycles, std::uint64_t seed);
};

TrafficTrace generate_traffic(const TrafficModel& model, std::uint64_t n_cycles, std::uint64_t seed);
inline TrafficTrace generate_traffic(const TrafficModel& model, std::uint64_t n_cycles) {
    return generate_traffic(model, n_cycles, model.seed);
}

// Enough seeded random plaintext blocks to cover `busy_cycles` cipher cycles.
std::vector<Block128> random_plaintexts(std::size_t busy_cycles, std::uint64_t seed);

} // namespace htsim
