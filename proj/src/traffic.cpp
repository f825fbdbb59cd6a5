#include "htsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"

namespace htsim {

void TrafficModel::validate() const {
    if (!(busy_prob >= 0.0 && busy_prob <= 1.0))
        throw StructuralError("busy_prob must be in [0, 1], got " + std::to_string(busy_prob));
    if (!(burst_len_mean >= 1.0) || !std::isfinite(burst_len_mean))
        throw StructuralError("burst_len_mean must be a finite value >= 1, got " + std::to_string(burst_len_mean));
    if (busy_prob > 0.0 && busy_prob < 1.0 && idle_to_busy_prob() > 1.0 + 1e-12)
        throw StructuralError("burst_len_mean " + std::to_string(burst_len_mean) +
                              " too short for busy_prob " + std::to_string(busy_prob) + "; need >= " +
                              std::to_string(busy_prob / (1.0 - busy_prob)));
}

double TrafficModel::busy_to_idle_prob() const {
    if (busy_prob >= 1.0) return 0.0;
    return 1.0 / burst_len_mean;
}

double TrafficModel::idle_to_busy_prob() const {
    if (busy_prob <= 0.0) return 0.0;
    if (busy_prob >= 1.0) return 1.0;
    return busy_prob / (burst_len_mean * (1.0 - busy_prob));
}

std::size_t TrafficTrace::busy_count() const noexcept {
    return static_cast<std::size_t>(std::count(busy.begin(), busy.end(), Bit{1}));
}

TrafficTrace TrafficTrace::all_idle(std::size_t n_cycles) { return TrafficTrace{BitVector(n_cycles, 0), {}}; }

TrafficTrace TrafficTrace::all_busy(std::size_t n_cycles, std::uint64_t seed) {
    return TrafficTrace{BitVector(n_cycles, 1), random_plaintexts(n_cycles, seed)};
}

std::vector<Block128> random_plaintexts(std::size_t busy_cycles, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Block128> blocks((busy_cycles + kBlockBits - 1) / kBlockBits);
    for (auto& block : blocks)
        for (auto& b : block) b = rng.byte();
    return blocks;
}

TrafficTrace generate_traffic(const TrafficModel& model, std::uint64_t n_cycles, std::uint64_t seed) {
    model.validate();
    Rng rng(derive_seed(seed, 0));
    TrafficTrace trace;
    trace.busy.resize(n_cycles);
    if (model.busy_prob <= 0.0) {
        std::fill(trace.busy.begin(), trace.busy.end(), Bit{0});
    } else if (model.busy_prob >= 1.0) {
        std::fill(trace.busy.begin(), trace.busy.end(), Bit{1});
    } else {
        const double enter = model.idle_to_busy_prob();
        const double leave = model.busy_to_idle_prob();
        bool busy = rng.bernoulli(model.busy_prob);
        for (std::uint64_t i = 0; i < n_cycles; ++i) {
            trace.busy[i] = busy ? 1 : 0;
            busy = busy ? !rng.bernoulli(leave) : rng.bernoulli(enter);
        }
    }
    trace.plaintexts = random_plaintexts(trace.busy_count(), derive_seed(seed, 1));
    return trace;
}

} // namespace htsim
