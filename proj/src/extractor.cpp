#include "htsim/extractor.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "htsim/errors.hpp"

namespace htsim {

void ExtractorConfig::validate() const {
    if (window_len == 0) throw StructuralError("window_len must be positive");
    if (key_len == 0) throw StructuralError("key_len must be positive");
    if (!(lo_threshold < hi_threshold))
        throw StructuralError("lo_threshold " + std::to_string(lo_threshold) + " must be below hi_threshold " +
                              std::to_string(hi_threshold));
    if (hi_threshold > window_len)
        throw StructuralError("hi_threshold " + std::to_string(hi_threshold) + " exceeds window_len " +
                              std::to_string(window_len));
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Bit0: return "bit0";
    case Verdict::Bit1: return "bit1";
    case Verdict::NonKey: return "nonkey";
    }
    return "?";
}

WindowVerdict classify_window(std::size_t counter, const ExtractorConfig& config) {
    if (counter > config.window_len)
        throw StructuralError("window counter " + std::to_string(counter) + " exceeds window_len " +
                              std::to_string(config.window_len));
    if (counter <= config.lo_threshold) return {counter, Verdict::Bit0};
    if (counter >= config.hi_threshold) return {counter, Verdict::Bit1};
    return {counter, Verdict::NonKey};
}

Extractor::Extractor(ExtractorConfig config) : Extractor(config, ShiftRegister(config.lfsr.width())) {}

Extractor::Extractor(ExtractorConfig config, ShiftRegister mirror_seed)
    : config_(std::move(config)), mirror_(config_.lfsr, std::move(mirror_seed)) {
    config_.validate();
    recent_.assign(config_.window_len, 0);
    // A flip at t corrupts estimates t and t + 1 + p for each tap p; every
    // maximal run of consecutive corrupted cycles toggles the estimate twice.
    std::size_t prev = 0;
    flip_toggles_ = 2;
    for (std::size_t p : config_.lfsr.taps()) {
        if (p + 1 != prev + 1) flip_toggles_ += 2;
        prev = p + 1;
    }
}

void Extractor::push_estimate(Bit e) {
    std::size_t idx = recent_head_ + window_pos_;
    if (idx >= recent_.size()) idx -= recent_.size();
    recent_[idx] = e;
    ++window_pos_;
    counter_ += e;
}

void Extractor::drop_oldest() {
    counter_ -= recent_[recent_head_];
    recent_head_ = (recent_head_ + 1) % recent_.size();
    --window_pos_;
}

void Extractor::clear_window() {
    recent_head_ = 0;
    window_pos_ = 0;
    counter_ = 0;
}

std::optional<WindowVerdict> Extractor::step(Bit received) {
    const std::uint64_t now = mirror_.cycle();
    const Bit e = mirror_.descramble(received);
    if (now > 0 && e != last_estimate_) ++toggles_;
    last_estimate_ = e;
    push_estimate(e);
    if (window_pos_ < config_.window_len) return std::nullopt;

    const WindowVerdict v = classify_window(counter_, config_);
    if (v.verdict == Verdict::NonKey) {
        drop_oldest();
    } else {
        const std::uint64_t offset = now + 1 - config_.window_len;
        const std::uint64_t gap = detected_.empty() ? offset : offset - detected_.back().stream_offset;
        const std::size_t allowance = flip_toggles_ + gap / config_.window_len + 1;
        detected_.push_back({offset, v.verdict == Verdict::Bit1 ? Bit{1} : Bit{0}, counter_, toggles_ <= allowance});
        toggles_ = 0;
        clear_window();
    }
    return v;
}

ExtractorStepResult extractor_step(const Extractor& state, Bit received_bit) {
    ExtractorStepResult r{state, std::nullopt};
    r.verdict = r.state.step(received_bit);
    return r;
}

namespace {

constexpr std::size_t kMaxSkip = 3;      // missed windows bridged in one transition
// A wrong verdict needs most of a window corrupted, while missed windows are
// routine; disagreements therefore weigh far more than skips.
constexpr std::size_t kMismatchPenalty = 8;
constexpr std::size_t kShiftPenalty = 2; // per skipped or repeated key position
// Contiguous detections (exactly one window apart) share one alignment, so a
// skip or repeat between them needs much stronger evidence.
constexpr std::size_t kCadencePenalty = 6;
// Across a quiet gap of two or more windows the elapsed time fixes the
// advance; only deviations from it are charged, per position.
constexpr int kMaxRounds = 24;
constexpr std::size_t kMaxHypotheses = 16;

// Detection timing, both empty when only the bits are known.
// cadence[i]: detection i is exactly one window after detection i - 1.
// elapsed[i]: the gap before detection i, in whole windows (rounded).
struct Timing {
    std::span<const std::uint8_t> cadence;
    std::span<const std::uint32_t> elapsed;
};

struct Alignment {
    std::size_t cost = 0;
    std::vector<std::size_t> position; // key position of each detected bit
    std::vector<std::uint8_t> advance; // position advance into each detected bit (0 = repeat)
    std::size_t dropped = 0;
    std::size_t repeated = 0;
};

// Viterbi pass of the detected bits against a cyclic template.
// With start set, the first detection is pinned to that key position.
Alignment align(std::span<const Bit> detected, const BitVector& key, const Timing& timing,
                std::optional<std::size_t> start = std::nullopt) {
    const std::size_t n = detected.size();
    const std::size_t len = key.size();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

    // step[i * len + j]: advance used to reach position j at detection i.
    std::vector<std::uint8_t> step(n * len, 1);
    std::vector<std::size_t> prev(len), cur(len);
    for (std::size_t j = 0; j < len; ++j) prev[j] = (start && *start != j) ? kInf : (detected[0] != key[j] ? kMismatchPenalty : 0);

    // Advances tried in preference order: normal, repeat, then skips.
    std::vector<std::size_t> advances = {1};
    if (len > 1) advances.push_back(0);
    for (std::size_t a = 2; a <= kMaxSkip + 1 && a < len; ++a) advances.push_back(a);

    for (std::size_t i = 1; i < n; ++i) {
        const bool contiguous = !timing.cadence.empty() && timing.cadence[i];
        const std::size_t shift_penalty = contiguous ? kCadencePenalty : kShiftPenalty;
        const std::size_t timed = timing.elapsed.empty() || contiguous ? 0 : timing.elapsed[i];
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t best = kInf;
            std::uint8_t best_adv = 1;
            for (std::size_t adv : advances) {
                const std::size_t from = (j + len - adv) % len;
                std::size_t penalty = 0;
                if (timed >= 2)
                    penalty = kShiftPenalty * (adv > timed ? adv - timed : timed - adv);
                else if (adv == 0)
                    penalty = shift_penalty;
                else if (adv > 1)
                    penalty = shift_penalty * (adv - 1);
                const std::size_t c = prev[from] + penalty;
                if (c < best) {
                    best = c;
                    best_adv = static_cast<std::uint8_t>(adv);
                }
            }
            cur[j] = best + (detected[i] != key[j] ? kMismatchPenalty : 0);
            step[i * len + j] = best_adv;
        }
        std::swap(prev, cur);
    }

    Alignment a;
    std::size_t j = static_cast<std::size_t>(std::min_element(prev.begin(), prev.end()) - prev.begin());
    a.cost = prev[j];
    a.position.assign(n, 0);
    a.advance.assign(n, 1);
    for (std::size_t i = n; i-- > 0;) {
        a.position[i] = j;
        if (i == 0) break;
        const std::size_t adv = step[i * len + j];
        a.advance[i] = static_cast<std::uint8_t>(adv);
        if (adv == 0) ++a.repeated;
        if (adv > 1) a.dropped += adv - 1;
        j = (j + len - adv) % len;
    }
    return a;
}

BitVector vote(std::span<const Bit> detected, const Alignment& a, const BitVector& previous) {
    const std::size_t len = previous.size();
    std::vector<std::size_t> ones(len, 0), total(len, 0);
    for (std::size_t i = 0; i < detected.size(); ++i) {
        if (a.advance[i] == 0) continue; // repeats say nothing about the position itself
        ones[a.position[i]] += detected[i];
        ++total[a.position[i]];
    }
    BitVector key = previous;
    for (std::size_t j = 0; j < len; ++j) {
        if (2 * ones[j] > total[j]) key[j] = 1;
        else if (2 * ones[j] < total[j]) key[j] = 0;
    }
    return key;
}

// A template cut from a stretch that missed or repeated windows lacks true
// positions and carries spare ones. Most passes then agree on an extra bit
// between two template positions and on skipping each spare; apply every
// such insert/delete pair seen in at least `support` passes.
std::optional<BitVector> repair(std::span<const Bit> detected, const Alignment& a, const BitVector& key,
                                std::size_t support) {
    const std::size_t len = key.size();
    std::vector<std::size_t> inserted(len, 0), inserted_ones(len, 0), skipped(len, 0);
    for (std::size_t i = 1; i < detected.size(); ++i) {
        const std::size_t adv = a.advance[i];
        if (adv == 0) {
            ++inserted[a.position[i]];
            inserted_ones[a.position[i]] += detected[i];
        }
        for (std::size_t s = 1; s < adv; ++s) ++skipped[(a.position[i] + len - s) % len];
    }

    auto strongest = [&](const std::vector<std::size_t>& counts) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < len; ++j)
            if (counts[j] >= support) idx.push_back(j);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return counts[x] > counts[y]; });
        return idx;
    };
    auto gaps = strongest(inserted);
    auto spares = strongest(skipped);
    const std::size_t pairs = std::min(gaps.size(), spares.size());
    if (pairs == 0) return std::nullopt;
    gaps.resize(pairs);
    spares.resize(pairs);

    std::vector<bool> is_gap(len, false), is_spare(len, false);
    for (std::size_t g : gaps) is_gap[g] = true;
    for (std::size_t q : spares) is_spare[q] = true;
    BitVector out;
    out.reserve(len);
    for (std::size_t j = 0; j < len; ++j) {
        if (!is_spare[j]) out.push_back(key[j]);
        if (is_gap[j]) out.push_back(2 * inserted_ones[j] >= inserted[j] ? Bit{1} : Bit{0});
    }
    return out;
}

// Windows whose time passed between detections without the alignment
// advancing over them; elapsed[i] is the gap before detection i in windows.
std::size_t timing_shortfall(const Alignment& a, std::span<const std::uint32_t> elapsed) {
    std::size_t total = 0;
    for (std::size_t i = 1; i < elapsed.size(); ++i)
        if (elapsed[i] > a.advance[i]) total += elapsed[i] - a.advance[i];
    return total;
}

Reassembly finish(std::span<const Bit> detected, const Timing& timing, const BitVector& key, Alignment a) {
    const std::size_t len = key.size();
    // The first detection is key bit 0 or a later one (when the first
    // windows were lost), never an earlier one. Among equal-cost starts
    // prefer the one that best accounts for elapsed time, then the latest.
    std::size_t best_shortfall = timing_shortfall(a, timing.elapsed);
    Alignment probe = a;
    for (std::size_t ahead = 1; ahead <= kMaxSkip && ahead < len; ++ahead) {
        probe = align(detected, key, timing, (probe.position[0] + 1) % len);
        if (probe.cost != a.cost) break;
        const std::size_t shortfall = timing_shortfall(probe, timing.elapsed);
        if (shortfall <= best_shortfall) {
            best_shortfall = shortfall;
            a = probe;
        }
    }
    // Rotate so the first detection lands on key position 0.
    const std::size_t shift = a.position[0];
    BitVector rotated(len);
    for (std::size_t j = 0; j < len; ++j) rotated[j] = key[(j + shift) % len];
    std::vector<std::size_t> positions(a.position.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = (a.position[i] + len - shift) % len;
    return Reassembly{std::move(rotated), a.cost, a.dropped, a.repeated, std::move(positions)};
}

Reassembly reassemble_from(std::span<const Bit> detected, const Timing& timing, std::size_t key_len,
                           std::span<const std::size_t> starts) {
    const std::size_t passes = detected.size() / key_len;
    bool have_best = false;
    Reassembly best;
    for (std::size_t start : starts) {
        BitVector key(detected.begin() + static_cast<std::ptrdiff_t>(start),
                      detected.begin() + static_cast<std::ptrdiff_t>(start + key_len));
        Alignment a = align(detected, key, timing);
        for (int round = 0; round < kMaxRounds && a.cost > 0; ++round) {
            BitVector next = vote(detected, a, key);
            if (next != key) {
                Alignment na = align(detected, next, timing);
                if (na.cost <= a.cost) {
                    key = std::move(next);
                    a = std::move(na);
                    continue;
                }
            }
            // Voting is stable; try structural repairs, most supported first.
            bool improved = false;
            for (std::size_t support = std::max<std::size_t>(2, (passes + 1) / 2);; support = support * 2 / 3) {
                support = std::max<std::size_t>(2, support);
                if (auto fixed = repair(detected, a, key, support)) {
                    Alignment na = align(detected, *fixed, timing);
                    if (na.cost < a.cost) {
                        key = std::move(*fixed);
                        a = std::move(na);
                        improved = true;
                        break;
                    }
                }
                if (support == 2) break;
            }
            if (!improved) break;
        }
        if (!have_best || a.cost < best.cost) {
            best = finish(detected, timing, key, std::move(a));
            have_best = true;
        }
        if (best.cost == 0) break;
    }
    return best;
}

void check_reassembly_input(std::size_t detected, std::size_t key_len) {
    if (key_len == 0) throw StructuralError("key_len must be positive");
    if (detected < key_len)
        throw StructuralError("reassembly needs at least " + std::to_string(key_len) + " detected bits, got " +
                              std::to_string(detected));
}

} // namespace

Reassembly reassemble_key(std::span<const Bit> detected, std::size_t key_len) {
    check_reassembly_input(detected.size(), key_len);
    const std::size_t last = detected.size() - key_len;
    const std::size_t stride = std::max<std::size_t>(1, (last + kMaxHypotheses - 1) / kMaxHypotheses);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s <= last; s += stride) starts.push_back(s);
    return reassemble_from(detected, Timing{}, key_len, starts);
}

Reassembly align_to_key(std::span<const Bit> detected, const BitVector& key) {
    if (key.empty()) throw StructuralError("key must be non-empty");
    if (detected.empty()) throw StructuralError("no detected bits to align");
    return finish(detected, Timing{}, key, align(detected, key, Timing{}));
}

Reassembly reassemble_key(std::span<const DetectedBit> detected, std::size_t key_len, std::size_t window_len) {
    check_reassembly_input(detected.size(), key_len);
    const std::size_t n = detected.size();

    std::vector<std::uint8_t> cadence(n, 0);
    std::vector<std::uint32_t> elapsed(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::uint64_t gap = detected[i].stream_offset - detected[i - 1].stream_offset;
        cadence[i] = gap == window_len;
        if (detected[i].quiet_gap) elapsed[i] = static_cast<std::uint32_t>((gap + window_len / 2) / window_len);
    }
    std::vector<std::size_t> off_cadence_prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) off_cadence_prefix[i + 1] = off_cadence_prefix[i] + (cadence[i] ? 0 : 1);

    const std::size_t last = n - key_len;
    std::vector<std::pair<std::size_t, std::size_t>> ranked; // (off-cadence transitions, start)
    ranked.reserve(last + 1);
    for (std::size_t s = 0; s <= last; ++s) {
        const std::size_t bad = off_cadence_prefix[s + key_len] - off_cadence_prefix[s + 1];
        ranked.emplace_back(bad, s);
    }
    std::stable_sort(ranked.begin(), ranked.end());

    // Keep hypotheses apart so they do not all share one flaw.
    const std::size_t spacing = std::max<std::size_t>(1, key_len / 8);
    std::vector<std::size_t> starts;
    for (const auto& [bad, s] : ranked) {
        if (starts.size() == kMaxHypotheses) break;
        const bool near = std::any_of(starts.begin(), starts.end(), [&](std::size_t t) {
            return (t > s ? t - s : s - t) < spacing;
        });
        if (!near) starts.push_back(s);
    }

    BitVector bits;
    bits.reserve(n);
    for (const auto& d : detected) bits.push_back(d.bit);
    return reassemble_from(bits, Timing{cadence, elapsed}, key_len, starts);
}

KeyRecovery recover_key(std::span<const Bit> received, const ExtractorConfig& config) {
    Extractor extractor(config);
    KeyRecovery r;
    r.stats.histogram.assign(config.window_len + 1, 0);
    r.stats.stream_len = received.size();
    for (Bit b : received) {
        const auto v = extractor.step(b);
        if (!v) continue;
        ++r.stats.histogram[v->counter];
        switch (v->verdict) {
        case Verdict::Bit0: ++r.stats.bit0_windows; break;
        case Verdict::Bit1: ++r.stats.bit1_windows; break;
        case Verdict::NonKey: ++r.stats.nonkey_windows; break;
        }
    }
    r.stats.detected = extractor.detected_bits();

    if (r.stats.detected.size() < config.key_len) return r;

    r.alignment = reassemble_key(r.stats.detected, config.key_len, config.window_len);
    r.key_estimate = r.alignment.key;
    r.status = RecoveryStatus::Recovered;
    return r;
}

} // namespace htsim
