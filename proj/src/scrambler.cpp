#include "htsim/scrambler.hpp"

#include <algorithm>
#include <string>

#include "htsim/errors.hpp"

namespace htsim {

namespace {

void require_bit(Bit b) {
    if (b > 1) throw StructuralError("bit value " + std::to_string(b) + " is not 0 or 1");
}

} // namespace

LfsrConfig::LfsrConfig(std::size_t width, std::vector<std::size_t> taps) : width_(width), taps_(std::move(taps)) {
    if (width_ < 2) throw StructuralError("lfsr width must be >= 2, got " + std::to_string(width_));
    if (taps_.empty()) throw StructuralError("lfsr tap set is empty");
    std::sort(taps_.begin(), taps_.end());
    if (std::adjacent_find(taps_.begin(), taps_.end()) != taps_.end())
        throw StructuralError("lfsr taps must be distinct");
    if (taps_.back() >= width_)
        throw StructuralError("lfsr tap " + std::to_string(taps_.back()) + " out of range for width " +
                              std::to_string(width_));
}

LfsrConfig LfsrConfig::default_config() { return LfsrConfig(128, {0, 1, 6, 127}); }

ShiftRegister::ShiftRegister(std::size_t width) : storage_(width, 0) {}

ShiftRegister::ShiftRegister(std::span<const Bit> contents) : storage_(contents.begin(), contents.end()) {
    for (auto b : storage_) require_bit(b);
}

BitVector ShiftRegister::bits() const {
    BitVector out(width());
    for (std::size_t i = 0; i < width(); ++i) out[i] = (*this)[i];
    return out;
}

bool ShiftRegister::all_zero() const noexcept {
    return std::all_of(storage_.begin(), storage_.end(), [](Bit b) { return b == 0; });
}

bool ShiftRegister::operator==(const ShiftRegister& other) const {
    if (width() != other.width()) return false;
    for (std::size_t i = 0; i < width(); ++i)
        if ((*this)[i] != other[i]) return false;
    return true;
}

Bit lfsr_feedback(const LfsrConfig& config, std::span<const Bit> reg) {
    if (reg.size() != config.width())
        throw StructuralError("register length " + std::to_string(reg.size()) + " != lfsr width " +
                              std::to_string(config.width()));
    Bit fb = 0;
    for (auto t : config.taps()) fb ^= reg[t];
    return fb;
}

Bit lfsr_feedback(const LfsrConfig& config, const ShiftRegister& reg) {
    if (reg.width() != config.width())
        throw StructuralError("register length " + std::to_string(reg.width()) + " != lfsr width " +
                              std::to_string(config.width()));
    Bit fb = 0;
    for (auto t : config.taps()) fb ^= reg[t];
    return fb;
}

ScramblerState::ScramblerState(LfsrConfig config) : config_(std::move(config)), reg_(config_.width()) {}

ScramblerState::ScramblerState(LfsrConfig config, ShiftRegister reg)
    : config_(std::move(config)), reg_(std::move(reg)) {
    if (reg_.width() != config_.width())
        throw StructuralError("register length " + std::to_string(reg_.width()) + " != lfsr width " +
                              std::to_string(config_.width()));
}

Bit ScramblerState::feedback() const noexcept {
    Bit fb = 0;
    for (auto t : config_.taps()) fb ^= reg_[t];
    return fb;
}

Bit ScramblerState::scramble(Bit payload) {
    require_bit(payload);
    const Bit out = payload ^ feedback();
    reg_.shift_in(out);
    ++cycle_;
    return out;
}

Bit ScramblerState::descramble(Bit received) {
    require_bit(received);
    const Bit estimate = received ^ feedback();
    reg_.shift_in(received);
    ++cycle_;
    return estimate;
}

void ScramblerState::shift_in(Bit line_bit) {
    require_bit(line_bit);
    reg_.shift_in(line_bit);
    ++cycle_;
}

StepResult scramble_step(const ScramblerState& state, Bit payload_bit) {
    StepResult r{0, state};
    r.bit = r.state.scramble(payload_bit);
    return r;
}

StepResult descramble_step(const ScramblerState& state, Bit received_bit) {
    StepResult r{0, state};
    r.bit = r.state.descramble(received_bit);
    return r;
}

} // namespace htsim
