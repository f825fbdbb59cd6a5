#pragma once

// Trigger-parameter analysis for deterministic Trojans: for a trigger-state
// set T, d(T) counts its wires, t(T) is the payload propagation delay in
// cycles, alpha(T) the probability a triggered Trojan shows no explicit
// malicious behaviour to a tester, l(T) the placement spread of its wires.
// A Trojan lies in H_{d,t,alpha,l} if some T it can be represented by meets
// all four bounds.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "htsim/design_graph.hpp"
#include "htsim/traffic.hpp"
#include "htsim/trojan_host.hpp"

namespace htsim {

struct TriggerQuad {
    std::uint64_t d = 0;
    std::uint64_t t = 0;
    double alpha = 0.0;
    std::uint64_t l = 0;

    void validate() const;
    bool operator==(const TriggerQuad&) const = default;
};

// Explicit wires count once each; a whole-module reference contributes the
// module's declared wire count (explicit wires of that module are not
// double-counted).
std::uint64_t trigger_dimension(const DesignGraph& design, const TriggerStateSet& set);

// Maximum pairwise Manhattan distance over the set's placements. Whole-module
// references contribute the module's placed wires, plus its bounding-box
// corners when it declares wires that are not placed. Unplaced explicit
// wires are a StructuralError.
std::uint64_t trigger_locality(const DesignGraph& design, const TriggerStateSet& set);

std::uint64_t payload_delay_min(std::uint64_t key_len, std::uint64_t window_len);

struct PayloadDelay {
    enum class Status { Measured, Incomplete, NeverTriggered };
    Status status = Status::NeverTriggered;
    std::uint64_t cycles = 0;       // valid when Measured
    std::size_t windows_completed = 0;
};

const char* to_string(PayloadDelay::Status s) noexcept;

// Inclusive cycle count from the first idle cycle through the end of the
// key_len-th completed window.
PayloadDelay measure_payload_delay(const TriggerLog& log, std::size_t key_len);

// Existential: true iff some quad meets every bound. Empty region throws.
bool class_membership(std::span<const TriggerQuad> region, const TriggerQuad& bounds);

struct SimulationConfig {
    HostConfig host;
    Block128 key{};
    TrafficModel traffic;
    std::uint64_t n_cycles = 0;
};

// Trojan-free reference behaviour: the AES core under the same key.
class GoldenModel {
  public:
    explicit GoldenModel(const Block128& key) : aes_(key) {}
    Block128 encrypt(const Block128& plaintext) const { return aes_.encrypt(plaintext); }

  private:
    Aes128 aes_;
};

// Returns true when the tester flags the run as malicious. Sees only the
// core's inputs (trace), its output pin, and the golden model.
using TesterOracle = std::function<bool(const TrafficTrace& trace, const HostRun& run, const GoldenModel& golden)>;

namespace oracles {
// Ciphertext on busy cycles must match the golden AES output bit for bit.
TesterOracle functional_correctness();
TesterOracle always_flag();
TesterOracle never_flag();
// Expects the pin to stay at 0 whenever no plaintext is present.
TesterOracle idle_quiet();

// "functional", "always-flag", "never-flag", "idle-quiet".
TesterOracle by_name(const std::string& name);
const std::vector<std::string>& names();
} // namespace oracles

struct AlphaEstimate {
    double alpha = 0.0;
    std::size_t trials = 0;
    std::size_t triggered = 0;
    std::size_t flagged = 0;
    std::size_t untriggered = 0;
    std::size_t oracle_errors = 0; // excluded from alpha
};

// Monte-Carlo over seeded traffic traces; trial i uses derive_seed(seed, i).
// Results are reduced by trial index, so `workers` never changes the answer.
// Throws ContractError when no trial triggers.
AlphaEstimate implicit_behavior_factor(const SimulationConfig& sim, const TesterOracle& oracle,
                                       std::size_t n_trials, std::uint64_t seed, std::size_t workers = 1);

struct AlphaSettings {
    TesterOracle oracle = oracles::functional_correctness();
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// One quad per trigger set with d and l from the design and t, alpha from
// simulation (shared by every set, as they describe the same payload).
// t must be measurable within sim.n_cycles (ContractError otherwise).
std::vector<TriggerQuad> achievable_region(const DesignGraph& design, std::span<const TriggerStateSet> sets,
                                           const SimulationConfig& sim, const AlphaSettings& alpha);
std::vector<TriggerQuad> achievable_region(const DesignGraph& design, std::span<const TriggerStateSet> sets,
                                           std::uint64_t t, double alpha);

} // namespace htsim
