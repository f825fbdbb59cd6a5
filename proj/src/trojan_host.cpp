#include "htsim/trojan_host.hpp"

#include <string>

#include "htsim/errors.hpp"

namespace htsim {

KeyMaterial::KeyMaterial(BitVector key_bits) : bits_(std::move(key_bits)) {
    if (bits_.empty()) throw StructuralError("key material is empty");
    for (auto b : bits_)
        if (b > 1) throw StructuralError("key material contains a non-binary value");
}

KeyMaterial KeyMaterial::from_block(const Block128& key) { return KeyMaterial(block_to_bits(key)); }

TrojanHost::TrojanHost(HostConfig config, const Block128& key)
    : TrojanHost(std::move(config), KeyMaterial::from_block(key), std::make_unique<Aes128>(key)) {}

TrojanHost::TrojanHost(HostConfig config, KeyMaterial key, std::unique_ptr<BlockCipher> cipher)
    : config_(std::move(config)), scrambler_(config_.lfsr), key_(std::move(key)), cipher_(std::move(cipher)) {
    if (config_.window_len == 0) throw StructuralError("window_len must be positive");
    if (!cipher_) throw StructuralError("host requires a cipher engine");
}

TrojanHost::TrojanHost(const TrojanHost& other)
    : config_(other.config_), scrambler_(other.scrambler_), key_(other.key_), cipher_(other.cipher_->clone()),
      window_progress_(other.window_progress_), pending_(other.pending_), log_(other.log_) {}

TrojanHost& TrojanHost::operator=(const TrojanHost& other) {
    if (this != &other) *this = TrojanHost(other);
    return *this;
}

void TrojanHost::preload_cipher_bits(const BitVector& bits) {
    for (auto b : bits) {
        if (b > 1) throw StructuralError("cipher bit is not 0 or 1");
        pending_.push_back(b);
    }
}

Bit TrojanHost::step(bool line_busy, const std::optional<Block128>& next_plaintext) {
    if (line_busy) {
        if (pending_.empty()) {
            if (!next_plaintext)
                throw ContractError("line busy at cycle " + std::to_string(cycle()) + " but no plaintext supplied");
            for (auto b : block_to_bits(cipher_->encrypt(*next_plaintext))) pending_.push_back(b);
        }
        const Bit out = pending_.front();
        pending_.pop_front();
        scrambler_.shift_in(out);
        window_progress_ = 0;
        return out;
    }

    if (!log_.first_idle_cycle) log_.first_idle_cycle = cycle();
    const std::uint64_t now = cycle();
    const Bit out = scrambler_.scramble(key_.current_bit());
    if (++window_progress_ == config_.window_len) {
        log_.windows.push_back({now, key_.next_index()});
        key_.advance();
        window_progress_ = 0;
    }
    return out;
}

HostStepResult host_step(const TrojanHost& state, bool line_busy, const std::optional<Block128>& next_plaintext) {
    HostStepResult r{0, state};
    r.output_bit = r.state.step(line_busy, next_plaintext);
    return r;
}

HostRun run_host(TrojanHost host, const TrafficTrace& trace, std::uint64_t n_cycles) {
    if (trace.size() < n_cycles)
        throw StructuralError("traffic trace has " + std::to_string(trace.size()) + " cycles, need " +
                              std::to_string(n_cycles));
    HostRun run;
    run.bits.reserve(n_cycles);
    run.cipher_mode.reserve(n_cycles);
    std::size_t next_block = 0;
    for (std::uint64_t i = 0; i < n_cycles; ++i) {
        const bool busy = trace.busy[i] != 0;
        std::optional<Block128> plaintext;
        if (host.needs_plaintext(busy)) {
            if (next_block >= trace.plaintexts.size())
                throw ContractError("traffic trace ran out of plaintext blocks at cycle " + std::to_string(i));
            plaintext = trace.plaintexts[next_block++];
        }
        run.bits.push_back(host.step(busy, plaintext));
        run.cipher_mode.push_back(busy ? 1 : 0);
    }
    run.log = host.trigger_log();
    return run;
}

HostRun run_host(const HostConfig& config, const Block128& key, const TrafficTrace& trace, std::uint64_t n_cycles) {
    return run_host(TrojanHost(config, key), trace, n_cycles);
}

BitVector idle_output_bits(const HostRun& run) {
    BitVector out;
    for (std::size_t i = 0; i < run.bits.size(); ++i)
        if (!run.cipher_mode[i]) out.push_back(run.bits[i]);
    return out;
}

} // namespace htsim
