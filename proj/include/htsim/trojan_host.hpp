#pragma once

// The Trojan-bearing IP core.
//
// Each cycle the output mux either forwards the next ciphertext bit (line
// busy) or, when the line is idle, emits the scrambler output for the current
// key bit. Every run of `window_len` consecutive idle cycles leaks one key
// bit; a busy cycle aborts the running window and the same bit is retried at
// the next idle run. After the last key bit the sequencer wraps to bit 0.
//
// Both mux paths clock the line bit into the scrambler register, so a
// descrambler watching the pin never loses synchronization.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "htsim/aes.hpp"
#include "htsim/bits.hpp"
#include "htsim/scrambler.hpp"
#include "htsim/traffic.hpp"

namespace htsim {

class KeyMaterial {
  public:
    explicit KeyMaterial(BitVector key_bits);
    // 128-bit key serialized most-significant bit first.
    static KeyMaterial from_block(const Block128& key);

    const BitVector& bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return bits_.size(); }
    std::size_t next_index() const noexcept { return next_; }
    Bit current_bit() const noexcept { return bits_[next_]; }
    void advance() noexcept { next_ = (next_ + 1) % bits_.size(); }

    bool operator==(const KeyMaterial&) const = default;

  private:
    BitVector bits_;
    std::size_t next_ = 0;
};

struct HostConfig {
    LfsrConfig lfsr = LfsrConfig::default_config();
    std::size_t window_len = 128;
};

struct TriggerRecord {
    std::uint64_t cycle; // last cycle of the completed idle window
    std::size_t key_index;

    bool operator==(const TriggerRecord&) const = default;
};

struct TriggerLog {
    std::optional<std::uint64_t> first_idle_cycle;
    std::vector<TriggerRecord> windows;

    bool operator==(const TriggerLog&) const = default;
};

class TrojanHost {
  public:
    // AES-128 engine; the leaked key is the cipher key.
    TrojanHost(HostConfig config, const Block128& key);
    // Arbitrary engine and leak material (tests use short keys and stub ciphers).
    TrojanHost(HostConfig config, KeyMaterial key, std::unique_ptr<BlockCipher> cipher);

    TrojanHost(const TrojanHost& other);
    TrojanHost& operator=(const TrojanHost& other);
    TrojanHost(TrojanHost&&) noexcept = default;
    TrojanHost& operator=(TrojanHost&&) noexcept = default;

    // One clock. When busy with nothing pending a plaintext is required
    // (ContractError otherwise); it is ignored in every other case.
    Bit step(bool line_busy, const std::optional<Block128>& next_plaintext);

    bool needs_plaintext(bool line_busy) const noexcept { return line_busy && pending_.empty(); }

    // Queues raw cipher bits ahead of the next block.
    void preload_cipher_bits(const BitVector& bits);

    const HostConfig& config() const noexcept { return config_; }
    const ScramblerState& scrambler() const noexcept { return scrambler_; }
    const KeyMaterial& key() const noexcept { return key_; }
    std::size_t window_progress() const noexcept { return window_progress_; }
    std::size_t pending_cipher_bits() const noexcept { return pending_.size(); }
    const TriggerLog& trigger_log() const noexcept { return log_; }
    std::uint64_t cycle() const noexcept { return scrambler_.cycle(); }

  private:
    HostConfig config_;
    ScramblerState scrambler_;
    KeyMaterial key_;
    std::unique_ptr<BlockCipher> cipher_;
    std::size_t window_progress_ = 0;
    std::deque<Bit> pending_;
    TriggerLog log_;
};

struct HostStepResult {
    Bit output_bit;
    TrojanHost state;
};

// Pure form of TrojanHost::step.
HostStepResult host_step(const TrojanHost& state, bool line_busy, const std::optional<Block128>& next_plaintext);

struct HostRun {
    BitVector bits;       // output pin, one bit per cycle
    BitVector cipher_mode; // 1 where the mux selected ciphertext
    TriggerLog log;
};

// Throws StructuralError if the trace is shorter than n_cycles, ContractError
// (with the cycle number) if the trace runs out of plaintexts.
HostRun run_host(TrojanHost host, const TrafficTrace& trace, std::uint64_t n_cycles);
HostRun run_host(const HostConfig& config, const Block128& key, const TrafficTrace& trace, std::uint64_t n_cycles);

// Output bits from idle (key-leak) cycles only, in order.
BitVector idle_output_bits(const HostRun& run);

} // namespace htsim
