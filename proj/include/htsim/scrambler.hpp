#pragma once

// Bit-serial multiplicative (self-synchronizing) scrambler.
//
// Register frame: position 0 always holds the most recently shifted-in bit,
// position width-1 the oldest. Taps index into that frame, so a tap at p
// reads the bit shifted in p+1 cycles ago.
//
//   scrambler:    y = x ^ fb(reg); reg <- y     (transmitted bit fed back)
//   descrambler:  x' = y ^ fb(reg); reg <- y    (driven by the received bit)
//
// Because both registers are driven by the line bit, a receiver with any
// initial contents agrees with the transmitter after `width` error-free bits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "htsim/bits.hpp"

namespace htsim {

class LfsrConfig {
  public:
    // Throws StructuralError unless width >= 2 and taps are non-empty,
    // distinct and below width. Taps are stored sorted.
    LfsrConfig(std::size_t width, std::vector<std::size_t> taps);

    // Width 128, taps {0, 1, 6, 127}: y_t depends on y_{t-1}, y_{t-2}, y_{t-7}, y_{t-128}.
    static LfsrConfig default_config();

    std::size_t width() const noexcept { return width_; }
    const std::vector<std::size_t>& taps() const noexcept { return taps_; }

    bool operator==(const LfsrConfig&) const = default;

  private:
    std::size_t width_;
    std::vector<std::size_t> taps_;
};

// Fixed-width shift register backed by a ring buffer so a shift is O(1).
class ShiftRegister {
  public:
    explicit ShiftRegister(std::size_t width);
    explicit ShiftRegister(std::span<const Bit> contents);

    std::size_t width() const noexcept { return storage_.size(); }

    Bit operator[](std::size_t pos) const noexcept {
        std::size_t idx = head_ + pos;
        if (idx >= storage_.size()) idx -= storage_.size();
        return storage_[idx];
    }

    // New bit lands at position 0; the bit at width-1 falls off.
    void shift_in(Bit b) noexcept {
        head_ = (head_ == 0 ? storage_.size() : head_) - 1;
        storage_[head_] = b;
    }

    BitVector bits() const;
    bool all_zero() const noexcept;

    bool operator==(const ShiftRegister& other) const;

  private:
    std::vector<Bit> storage_;
    std::size_t head_ = 0;
};

Bit lfsr_feedback(const LfsrConfig& config, std::span<const Bit> reg);
Bit lfsr_feedback(const LfsrConfig& config, const ShiftRegister& reg);

class ScramblerState {
  public:
    explicit ScramblerState(LfsrConfig config);
    ScramblerState(LfsrConfig config, ShiftRegister reg);

    const LfsrConfig& config() const noexcept { return config_; }
    const ShiftRegister& reg() const noexcept { return reg_; }
    std::uint64_t cycle() const noexcept { return cycle_; }

    Bit feedback() const noexcept;

    // In-place forms of scramble_step / descramble_step.
    Bit scramble(Bit payload);
    Bit descramble(Bit received);

    // Clocks a line bit straight into the register (transmitter mux passthrough).
    void shift_in(Bit line_bit);

    bool operator==(const ScramblerState&) const = default;

  private:
    LfsrConfig config_;
    ShiftRegister reg_;
    std::uint64_t cycle_ = 0;
};

struct StepResult {
    Bit bit;
    ScramblerState state;
};

StepResult scramble_step(const ScramblerState& state, Bit payload_bit);
StepResult descramble_step(const ScramblerState& state, Bit received_bit);

} // namespace htsim
