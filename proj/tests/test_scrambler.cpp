#include <doctest.h>

#include <bit>
#include <cstdint>
#include <vector>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"
#include "htsim/scrambler.hpp"

using namespace htsim;

namespace {

// Independent reference for widths up to 64: bit p of the word is register
// position p, so shifting in b is (reg << 1) | b.
struct WordScrambler {
    std::size_t width;
    std::uint64_t tap_mask;
    std::uint64_t reg;

    std::uint64_t mask() const { return width == 64 ? ~0ULL : ((1ULL << width) - 1); }
    Bit fb() const { return static_cast<Bit>(std::popcount(reg & tap_mask) & 1); }
    void push(Bit b) { reg = ((reg << 1) | b) & mask(); }
    Bit scramble(Bit x) {
        const Bit y = x ^ fb();
        push(y);
        return y;
    }
    Bit descramble(Bit y) {
        const Bit x = y ^ fb();
        push(y);
        return x;
    }
};

std::uint64_t tap_mask_of(const std::vector<std::size_t>& taps) {
    std::uint64_t m = 0;
    for (auto t : taps) m |= 1ULL << t;
    return m;
}

ShiftRegister register_from_word(std::size_t width, std::uint64_t word) {
    BitVector bits(width);
    for (std::size_t p = 0; p < width; ++p) bits[p] = (word >> p) & 1;
    return ShiftRegister(bits);
}

// Every tap subset of the given size, as sorted position lists.
std::vector<std::vector<std::size_t>> tap_sets(std::size_t width, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint64_t m = 0; m < (1ULL << width); ++m) {
        if (static_cast<std::size_t>(std::popcount(m)) != k) continue;
        std::vector<std::size_t> taps;
        for (std::size_t p = 0; p < width; ++p)
            if (m >> p & 1) taps.push_back(p);
        out.push_back(taps);
    }
    return out;
}

BitVector random_bits(Rng& rng, std::size_t n) {
    BitVector v(n);
    for (auto& b : v) b = static_cast<Bit>(rng.next_u64() & 1);
    return v;
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(LfsrConfig(1, {0}), StructuralError);
    CHECK_THROWS_AS(LfsrConfig(4, {}), StructuralError);
    CHECK_THROWS_AS(LfsrConfig(4, {1, 1}), StructuralError);
    CHECK_THROWS_AS(LfsrConfig(4, {4}), StructuralError);
    const LfsrConfig c(8, {5, 0, 3});
    CHECK(c.taps() == std::vector<std::size_t>{0, 3, 5});
    const auto d = LfsrConfig::default_config();
    CHECK(d.width() == 128);
    CHECK(d.taps() == std::vector<std::size_t>{0, 1, 6, 127});
}

TEST_CASE("feedback examples") {
    const LfsrConfig c(4, {0, 3});
    CHECK(lfsr_feedback(c, parse_bit_string("0000")) == 0);
    CHECK(lfsr_feedback(c, parse_bit_string("1001")) == 0);
    CHECK(lfsr_feedback(c, parse_bit_string("1010")) == 1);
    CHECK_THROWS_AS(lfsr_feedback(c, parse_bit_string("101")), StructuralError);
    CHECK_THROWS_AS(lfsr_feedback(c, ShiftRegister(5)), StructuralError);
}

TEST_CASE("scramble step examples") {
    const LfsrConfig c(4, {0, 3});
    const ScramblerState zero(c);

    auto r0 = scramble_step(zero, 0);
    CHECK(r0.bit == 0);
    CHECK(r0.state.reg().all_zero());
    CHECK(r0.state.cycle() == 1);

    auto r1 = scramble_step(zero, 1);
    CHECK(r1.bit == 1);
    CHECK(to_bit_string(r1.state.reg().bits()) == "1000");

    const ScramblerState s(c, ShiftRegister(parse_bit_string("1010")));
    auto r2 = scramble_step(s, 0);
    CHECK(r2.bit == 1);
    CHECK(to_bit_string(r2.state.reg().bits()) == "1101");
    // Pure form leaves the input untouched.
    CHECK(to_bit_string(s.reg().bits()) == "1010");
    CHECK(s.cycle() == 0);
}

TEST_CASE("descramble step examples") {
    const LfsrConfig c(4, {0, 3});
    auto r = descramble_step(ScramblerState(c), 0);
    CHECK(r.bit == 0);
    CHECK(r.state.cycle() == 1);

    // Equal registers: the estimate recovers the payload.
    const ScramblerState s(c, ShiftRegister(parse_bit_string("0110")));
    for (Bit k : {Bit{0}, Bit{1}}) {
        auto tx = scramble_step(s, k);
        auto rx = descramble_step(s, tx.bit);
        CHECK(rx.bit == k);
        CHECK(rx.state == tx.state);
    }
    CHECK_THROWS_AS(descramble_step(s, 2), StructuralError);
}

TEST_CASE("register shifts match the word reference") {
    Rng rng(3);
    const LfsrConfig c(8, {1, 4, 7});
    ScramblerState s(c);
    WordScrambler w{8, tap_mask_of(c.taps()), 0};
    for (int i = 0; i < 2000; ++i) {
        const Bit x = static_cast<Bit>(rng.next_u64() & 1);
        REQUIRE(s.scramble(x) == w.scramble(x));
        REQUIRE(s.reg() == register_from_word(8, w.reg));
    }
}

TEST_CASE("self-synchronization, exhaustive at small widths") {
    Rng rng(42);
    std::size_t configs = 0;
    for (std::size_t width = 4; width <= 8; ++width) {
        for (const auto& taps : {std::vector<std::size_t>{0, width - 1}, std::vector<std::size_t>{width - 1},
                                 std::vector<std::size_t>{1, width / 2, width - 1}}) {
            const LfsrConfig c(width, taps);
            const std::uint64_t tx_seed = rng.uniform_below(1ULL << width);
            const BitVector payload = random_bits(rng, 4 * width);
            for (std::uint64_t rx_seed = 0; rx_seed < (1ULL << width); ++rx_seed) {
                ScramblerState tx(c, register_from_word(width, tx_seed));
                ScramblerState rx(c, register_from_word(width, rx_seed));
                for (std::size_t t = 0; t < payload.size(); ++t) {
                    const Bit est = rx.descramble(tx.scramble(payload[t]));
                    if (t >= width) REQUIRE(est == payload[t]);
                }
            }
            ++configs;
        }
    }
    CHECK(configs == 15);
}

TEST_CASE("self-synchronization at width 128, random receiver seeds") {
    Rng rng(128);
    const LfsrConfig c = LfsrConfig::default_config();
    for (int trial = 0; trial < 100; ++trial) {
        ScramblerState tx(c, ShiftRegister(random_bits(rng, 128)));
        ScramblerState rx(c, ShiftRegister(random_bits(rng, 128)));
        const BitVector payload = random_bits(rng, 400);
        for (std::size_t t = 0; t < payload.size(); ++t) {
            const Bit est = rx.descramble(tx.scramble(payload[t]));
            if (t >= 128) REQUIRE(est == payload[t]);
        }
        CHECK(rx.reg() == tx.reg());
    }
}

TEST_CASE("single flip produces 1 + |taps| estimate errors at the predicted cycles") {
    Rng rng(5);
    const LfsrConfig c = LfsrConfig::default_config();
    const std::size_t n = 600, flip_at = 250;
    const BitVector payload = random_bits(rng, n);
    ScramblerState tx(c), rx(c);
    std::vector<std::size_t> wrong;
    for (std::size_t t = 0; t < n; ++t) {
        Bit y = tx.scramble(payload[t]);
        if (t == flip_at) y ^= 1;
        if (rx.descramble(y) != payload[t]) wrong.push_back(t);
    }
    std::vector<std::size_t> expected{flip_at};
    for (auto p : c.taps()) expected.push_back(flip_at + 1 + p);
    CHECK(wrong == expected);
}

TEST_CASE("error multiplication at width 8 against the word reference") {
    // Smaller sweep than the acceptance run: every tap set of size 2.
    for (const auto& taps : tap_sets(8, 2)) {
        const LfsrConfig c(8, taps);
        for (std::uint64_t seed = 0; seed < 256; seed += 37) {
            WordScrambler tx{8, tap_mask_of(taps), seed}, rx{8, tap_mask_of(taps), seed};
            std::size_t errors = 0;
            for (std::size_t t = 0; t < 40; ++t) {
                const Bit x = static_cast<Bit>((t * 5 + seed) % 3 == 0);
                Bit y = tx.scramble(x);
                if (t == 16) y ^= 1;
                errors += rx.descramble(y) != x;
            }
            REQUIRE(errors == 1 + taps.size());
        }
    }
}

TEST_CASE("determinism and zero preservation") {
    Rng rng(9);
    const LfsrConfig c = LfsrConfig::default_config();
    const BitVector payload = random_bits(rng, 1000);
    ScramblerState a(c), b(c);
    for (Bit x : payload) REQUIRE(a.scramble(x) == b.scramble(x));
    CHECK(a == b);

    ScramblerState z(c);
    for (int i = 0; i < 5000; ++i) REQUIRE(z.scramble(0) == 0);
    CHECK(z.reg().all_zero());
    CHECK(z.cycle() == 5000);
}

TEST_CASE("ring-buffer register agrees with a plain vector shift") {
    ShiftRegister r(5);
    BitVector ref(5, 0);
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const Bit b = static_cast<Bit>(rng.next_u64() & 1);
        r.shift_in(b);
        ref.insert(ref.begin(), b);
        ref.pop_back();
        REQUIRE(r.bits() == ref);
    }
}
