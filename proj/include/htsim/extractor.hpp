#pragma once

// Adversary-side key extractor.
//
// A mirror descrambler watches the output pin. Its estimate bit is 1 exactly
// when the mirror's feedback disagrees with the incoming bit; the window
// counter sums those disagreements. A key window carrying bit 0 holds the
// counter near 0, bit 1 near window_len, and ciphertext near window_len / 2.
//
// Framing: after a Bit0/Bit1 verdict the next window starts on the following
// cycle; after NonKey the window slides by one cycle, so the receiver needs no
// shared notion of window boundaries.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "htsim/bits.hpp"
#include "htsim/scrambler.hpp"

namespace htsim {

struct ExtractorConfig {
    LfsrConfig lfsr = LfsrConfig::default_config();
    std::size_t window_len = 128;
    std::size_t lo_threshold = 3;
    std::size_t hi_threshold = 125;
    std::size_t key_len = 128;

    // Requires lo < hi <= window_len and positive window_len / key_len.
    void validate() const;
};

enum class Verdict { Bit0, Bit1, NonKey };

const char* to_string(Verdict v) noexcept;

struct WindowVerdict {
    std::size_t counter;
    Verdict verdict;

    bool operator==(const WindowVerdict&) const = default;
};

// Thresholds are inclusive: counter <= lo -> Bit0, counter >= hi -> Bit1.
WindowVerdict classify_window(std::size_t counter, const ExtractorConfig& config);

struct DetectedBit {
    std::uint64_t stream_offset; // first cycle of the detecting window
    Bit bit;
    std::size_t counter = 0; // mismatch count of the detecting window
    // Few enough estimate toggles since the previous detection for the gap
    // to be idle time (key-bit changes plus at most one channel flip).
    bool quiet_gap = false;

    bool operator==(const DetectedBit&) const = default;
};

class Extractor {
  public:
    explicit Extractor(ExtractorConfig config);
    // Mirror register starts from arbitrary contents.
    Extractor(ExtractorConfig config, ShiftRegister mirror_seed);

    // Returns a verdict whenever a full window has been observed.
    std::optional<WindowVerdict> step(Bit received);

    const ExtractorConfig& config() const noexcept { return config_; }
    const ScramblerState& mirror() const noexcept { return mirror_; }
    std::size_t window_counter() const noexcept { return counter_; }
    std::size_t window_pos() const noexcept { return window_pos_; }
    const std::vector<DetectedBit>& detected_bits() const noexcept { return detected_; }
    std::uint64_t offset() const noexcept { return mirror_.cycle(); }

  private:
    ExtractorConfig config_;
    ScramblerState mirror_;
    // Ring of the current window's estimate bits, oldest at recent_head_.
    std::vector<Bit> recent_;
    std::size_t recent_head_ = 0;
    std::size_t window_pos_ = 0;
    std::size_t counter_ = 0;
    std::vector<DetectedBit> detected_;
    Bit last_estimate_ = 0;
    std::size_t toggles_ = 0;      // estimate changes since the last detection
    std::size_t flip_toggles_ = 0; // estimate changes one isolated channel flip causes

    void push_estimate(Bit e);
    void drop_oldest();
    void clear_window();
};

struct ExtractorStepResult {
    Extractor state;
    std::optional<WindowVerdict> verdict;
};

// Pure form of Extractor::step.
ExtractorStepResult extractor_step(const Extractor& state, Bit received_bit);

struct DetectionStats {
    std::vector<DetectedBit> detected;
    // histogram[c] = number of evaluated windows whose counter was c.
    std::vector<std::uint64_t> histogram;
    std::uint64_t bit0_windows = 0;
    std::uint64_t bit1_windows = 0;
    std::uint64_t nonkey_windows = 0;
    std::uint64_t stream_len = 0;
};

enum class RecoveryStatus { Recovered, InsufficientWindows };

struct Reassembly {
    BitVector key;
    // Alignment cost of the winning hypothesis: weighted bit disagreements
    // plus penalties for dropped and repeated key positions.
    std::size_t cost = 0;
    std::size_t dropped = 0;
    std::size_t repeated = 0;
    // Key index assigned to each detected bit, in the reported rotation.
    std::vector<std::size_t> positions;
};

// Folds a sequence of detected bits (the key leaked cyclically, possibly with
// missed or repeated windows) onto key_len positions. Each detected bit is
// assigned a position of a cyclic template by dynamic programming: the
// position advances by one per detection, may repeat (a retried window seen
// twice) or skip ahead (missed windows). The template is re-estimated by
// majority vote, and repaired where most passes agree it lacks or carries a
// spare position, until the cost stops falling. Several starting templates
// are tried and the cheapest wins. The first detection is taken as key bit 0.
// Requires detected.size() >= key_len.
Reassembly reassemble_key(std::span<const Bit> detected, std::size_t key_len);

// Cost of the best alignment of detected bits against a fixed cyclic key;
// the returned key is that template rotated as reassemble_key would report it.
Reassembly align_to_key(std::span<const Bit> detected, const BitVector& key);

// As reassemble_key above, using detection timing: detections exactly
// window_len apart are contiguous windows, so skips and repeats between them
// cost more, skips across a quiet gap spanning that many windows cost less,
// and starting templates come from the longest contiguous stretches.
Reassembly reassemble_key(std::span<const DetectedBit> detected, std::size_t key_len, std::size_t window_len);

struct KeyRecovery {
    RecoveryStatus status = RecoveryStatus::InsufficientWindows;
    BitVector key_estimate; // empty unless Recovered
    Reassembly alignment;
    DetectionStats stats;
};

KeyRecovery recover_key(std::span<const Bit> received, const ExtractorConfig& config);

} // namespace htsim
