// Acceptance run: one [PASS]/[FAIL] line per criterion.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "htsim/extractor.hpp"
#include "htsim/hatch_metrics.hpp"
#include "htsim/rng.hpp"
#include "htsim/scenario.hpp"
#include "htsim/scrambler.hpp"
#include "htsim/stats.hpp"
#include "htsim/trojan_host.hpp"

using namespace htsim;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Block128 random_block(Rng& rng) {
    Block128 b;
    for (auto& x : b) x = rng.byte();
    return b;
}

BitVector random_bits(Rng& rng, std::size_t n) {
    BitVector v(n);
    for (auto& b : v) b = static_cast<Bit>(rng.next_u64() & 1);
    return v;
}

ShiftRegister register_from_word(std::size_t width, std::uint64_t word) {
    BitVector bits(width);
    for (std::size_t p = 0; p < width; ++p) bits[p] = (word >> p) & 1;
    return ShiftRegister(bits);
}

std::vector<std::vector<std::size_t>> tap_sets(std::size_t width, std::size_t min_k, std::size_t max_k) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint64_t m = 1; m < (1ULL << width); ++m) {
        const auto k = static_cast<std::size_t>(std::popcount(m));
        if (k < min_k || k > max_k) continue;
        std::vector<std::size_t> taps;
        for (std::size_t p = 0; p < width; ++p)
            if (m >> p & 1) taps.push_back(p);
        out.push_back(taps);
    }
    return out;
}

std::size_t hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome ac1_exact_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    std::size_t exact = 0;
    const std::size_t n = 16640;
    for (int k = 0; k < 100; ++k) {
        const Block128 key = random_block(rng);
        const auto run = run_host(HostConfig{}, key, TrafficTrace::all_idle(n), n);
        const auto rec = recover_key(run.bits, ExtractorConfig{});
        exact += rec.status == RecoveryStatus::Recovered && rec.key_estimate == block_to_bits(key);
    }
    const double s = seconds_since(t0);
    return {exact == 100 && s < 1.0, std::to_string(exact) + "/100 keys exact in " + std::to_string(s) + " s"};
}

Outcome ac2_min_delay() {
    const auto run = run_host(HostConfig{}, parse_block("000102030405060708090a0b0c0d0e0f"),
                              TrafficTrace::all_idle(16640), 16640);
    const auto t = measure_payload_delay(run.log, 128);
    const bool ok = t.status == PayloadDelay::Status::Measured && t.cycles == 16384 &&
                    payload_delay_min(128, 128) == 16384;
    return {ok, "t = " + std::to_string(t.cycles)};
}

Outcome ac3_cipher_windows() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t windows = 10000, n = windows * 128;
    const auto run = run_host(HostConfig{}, parse_block("000102030405060708090a0b0c0d0e0f"),
                              TrafficTrace::all_busy(n, 33), n);
    const ExtractorConfig cfg;
    ScramblerState mirror(cfg.lfsr);
    double sum = 0;
    std::size_t keylike = 0, counter = 0;
    for (std::size_t i = 0; i < n; ++i) {
        counter += mirror.descramble(run.bits[i]);
        if (i % 128 == 127) {
            sum += static_cast<double>(counter);
            keylike += classify_window(counter, cfg).verdict != Verdict::NonKey;
            counter = 0;
        }
    }
    // Sliding framing evaluates every offset; none may look like a key bit.
    const auto rec = recover_key(run.bits, cfg);
    const double mean = sum / windows;
    const double s = seconds_since(t0);
    const bool ok = std::abs(mean - 64.0) <= 0.5 && keylike == 0 && rec.stats.detected.empty() && s < 5.0;
    return {ok, "mean counter " + std::to_string(mean) + ", key-like windows " + std::to_string(keylike) +
                    " aligned / " + std::to_string(rec.stats.detected.size()) + " sliding, " + std::to_string(s) +
                    " s"};
}

Outcome ac4_delay_grows_with_busyness() {
    const Block128 key = parse_block("000102030405060708090a0b0c0d0e0f");
    const std::uint64_t n = 2'000'000;
    std::vector<std::uint64_t> medians;
    std::string detail;
    bool all_measured = true;
    for (double p : {0.0, 0.25, 0.5, 0.75}) {
        std::vector<std::uint64_t> ts;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto trace = generate_traffic(TrafficModel{p, 128.0, derive_seed(4, seed)}, n);
            const auto t = measure_payload_delay(run_host(HostConfig{}, key, trace, n).log, 128);
            all_measured &= t.status == PayloadDelay::Status::Measured;
            ts.push_back(t.cycles);
        }
        std::sort(ts.begin(), ts.end());
        // Even count: lower median keeps the value integral.
        medians.push_back(ts[(ts.size() - 1) / 2]);
        detail += (detail.empty() ? "" : ", ") + std::string("p=") + std::to_string(p).substr(0, 4) + ": " +
                  std::to_string(medians.back());
    }
    const bool ok = all_measured && std::is_sorted(medians.begin(), medians.end());
    return {ok, "median t " + detail};
}

Outcome ac5_error_multiplication() {
    std::size_t cases = 0, failures = 0;
    const std::size_t len = 40;
    Rng rng(5);
    const BitVector payload = random_bits(rng, len);
    for (const auto& taps : tap_sets(8, 1, 4)) {
        const LfsrConfig c(8, taps);
        for (std::uint64_t state = 0; state < 256; ++state) {
            // Every flip position whose full error pattern lands in the stream.
            for (std::size_t flip = 0; flip + 1 + 7 < len; ++flip) {
                ScramblerState tx(c, register_from_word(8, state)), rx(c, register_from_word(8, state));
                std::size_t errors = 0;
                for (std::size_t t = 0; t < len; ++t) {
                    Bit y = tx.scramble(payload[t]);
                    if (t == flip) y ^= 1;
                    errors += rx.descramble(y) != payload[t];
                }
                ++cases;
                failures += errors != 1 + taps.size();
            }
        }
    }
    return {failures == 0, std::to_string(cases) + " cases, " + std::to_string(failures) + " failures"};
}

Outcome ac6_self_sync() {
    Rng rng(6);
    std::size_t cases = 0, failures = 0;
    for (std::size_t width = 4; width <= 8; ++width) {
        for (const auto& taps : tap_sets(width, 1, width)) {
            const LfsrConfig c(width, taps);
            const std::uint64_t tx_seed = rng.uniform_below(1ULL << width);
            const BitVector payload = random_bits(rng, 3 * width);
            for (std::uint64_t rx_seed = 0; rx_seed < (1ULL << width); ++rx_seed) {
                ScramblerState tx(c, register_from_word(width, tx_seed)), rx(c, register_from_word(width, rx_seed));
                bool ok = true;
                for (std::size_t t = 0; t < payload.size(); ++t) {
                    const Bit est = rx.descramble(tx.scramble(payload[t]));
                    if (t >= width && est != payload[t]) ok = false;
                }
                ++cases;
                failures += !ok;
            }
        }
    }
    const LfsrConfig wide = LfsrConfig::default_config();
    for (int trial = 0; trial < 1000; ++trial) {
        ScramblerState tx(wide, ShiftRegister(random_bits(rng, 128))), rx(wide, ShiftRegister(random_bits(rng, 128)));
        const BitVector payload = random_bits(rng, 384);
        bool ok = true;
        for (std::size_t t = 0; t < payload.size(); ++t) {
            const Bit est = rx.descramble(tx.scramble(payload[t]));
            if (t >= 128 && est != payload[t]) ok = false;
        }
        ++cases;
        failures += !ok;
    }
    return {failures == 0, std::to_string(cases) + " receiver seeds, " + std::to_string(failures) + " failures"};
}

Outcome ac7_stealth_battery() {
    Rng rng(7);
    const Block128 key = random_block(rng);
    const std::size_t n = 100000;
    const auto run = run_host(HostConfig{}, key, TrafficTrace::all_idle(n), n);
    const auto idle = idle_output_bits(run);
    const auto reports = stats::randomness_battery(idle, 0.01);
    const auto control = stats::randomness_battery(BitVector(n, 0), 0.01);
    std::string detail = "key " + to_hex(key) + ":";
    for (const auto& r : reports) detail += " " + r.test_name + (r.pass ? " ok" : " FAIL");
    detail += std::string("; zero control monobit ") + (control[0].pass ? "passes" : "fails");
    return {idle.size() == n && stats::all_pass(reports) && !control[0].pass, detail};
}

Outcome ac8_alpha() {
    SimulationConfig sim;
    sim.key = parse_block("000102030405060708090a0b0c0d0e0f");
    sim.traffic = TrafficModel{0.5, 128.0, 0};
    sim.n_cycles = 4096;
    const auto clean = implicit_behavior_factor(sim, oracles::functional_correctness(), 1000, 8, hardware_workers());
    const auto flagged = implicit_behavior_factor(sim, oracles::always_flag(), 1000, 8, hardware_workers());
    const bool ok = clean.triggered == 1000 && clean.alpha == 1.0 && flagged.triggered == 1000 && flagged.alpha == 0.0;
    return {ok, "functional alpha " + std::to_string(clean.alpha) + " over " + std::to_string(clean.triggered) +
                    " triggered, always-flag alpha " + std::to_string(flagged.alpha)};
}

Outcome ac9_membership() {
    // Direct reading of the class definition.
    auto reference = [](const std::vector<TriggerQuad>& region, const TriggerQuad& b) {
        for (const auto& q : region)
            if (q.d <= b.d && q.t <= b.t && q.alpha <= b.alpha && q.l <= b.l) return true;
        return false;
    };
    Rng rng(9);
    auto quad = [&] {
        // Small ranges make ties and near misses common.
        return TriggerQuad{rng.uniform_below(8), rng.uniform_below(8), static_cast<double>(rng.uniform_below(5)) / 4.0,
                           rng.uniform_below(8)};
    };
    std::size_t mismatches = 0, members = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<TriggerQuad> region(1 + rng.uniform_below(4));
        for (auto& q : region) q = quad();
        const TriggerQuad b = quad();
        const bool got = class_membership(region, b);
        mismatches += got != reference(region, b);
        members += got;
    }

    ScenarioConfig cfg = default_scenario();
    const auto metrics = compute_metrics(cfg, hardware_workers());
    const bool shipped_member = metrics.at("member").is_boolean() && metrics.at("member").get<bool>();
    const bool ok = mismatches == 0 && metrics.at("member").is_boolean() && !shipped_member;
    return {ok, std::to_string(mismatches) + " mismatches over 1000 instances (" + std::to_string(members) +
                    " members); shipped quad " + metrics.at("quad").dump() + " member of (2,100,0.9,10): " +
                    metrics.at("member").dump()};
}

Outcome ac10_determinism() {
    const std::vector<std::string> configs{
        "{}",
        R"({"traffic": {"busy_prob": 0.3}, "channel": {"flip_prob": 1e-4}, "n_cycles": 100000, "alpha": {"trials": 10}})",
        R"({"seed": 12, "traffic": {"busy_prob": 0.6, "burst_len_mean": 64}, "n_cycles": 60000})",
    };
    std::size_t identical = 0;
    for (const auto& text : configs) {
        const auto cfg = parse_scenario(nlohmann::json::parse(text));
        auto a = run_scenario(cfg, RunOptions{true, true, true, 1}).report;
        auto b = run_scenario(cfg, RunOptions{true, true, true, hardware_workers()}).report;
        a.erase("wall_clock_ms");
        b.erase("wall_clock_ms");
        identical += dump_report(a) == dump_report(b);
    }
    return {identical == configs.size(),
            std::to_string(identical) + "/" + std::to_string(configs.size()) + " scenarios byte-identical"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 exact key recovery", ac1_exact_recovery},
        {"AC2 minimum payload delay", ac2_min_delay},
        {"AC3 cipher-window statistics", ac3_cipher_windows},
        {"AC4 payload delay grows with busyness", ac4_delay_grows_with_busyness},
        {"AC5 error multiplication", ac5_error_multiplication},
        {"AC6 self-synchronization", ac6_self_sync},
        {"AC7 stealth battery", ac7_stealth_battery},
        {"AC8 alpha estimation", ac8_alpha},
        {"AC9 membership semantics", ac9_membership},
        {"AC10 determinism", ac10_determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
