#pragma once

// End-to-end experiment harness: host -> channel -> extractor -> metrics ->
// stats, driven by a JSON scenario config.
//
// Config schema (every field optional; defaults shown):
//   key            "000102030405060708090a0b0c0d0e0f"  32 hex digits, MSB first
//   lfsr           {"width": 128, "taps": [0, 1, 6, 127]}
//   window_len     128
//   thresholds     {"lo": 3, "hi": 125}
//   traffic        {"busy_prob": 0, "burst_len_mean": 128, "seed": <derived>}
//   channel        {"flip_prob": 0, "seed": <derived>}
//   n_cycles       16640
//   seed           1           master seed; component seeds derive from it
//   design         null        design-graph path (relative to the config file);
//                              null uses the built-in default design
//   oracle         "functional"
//   alpha          {"trials": 100, "n_cycles": 4096}
//   stats          {"enabled": true, "significance": 0.01}
//   bounds         {"d": 2, "t": 100, "alpha": 0.9, "l": 10}
//   grid           {}          sweep only: dotted config path -> list of values

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "htsim/bits.hpp"
#include "htsim/channel.hpp"
#include "htsim/extractor.hpp"
#include "htsim/hatch_metrics.hpp"
#include "htsim/scrambler.hpp"
#include "htsim/stats.hpp"
#include "htsim/traffic.hpp"

namespace htsim {

struct ScenarioConfig {
    Block128 key{};
    LfsrConfig lfsr = LfsrConfig::default_config();
    std::size_t window_len = 128;
    std::size_t lo_threshold = 3;
    std::size_t hi_threshold = 125;
    TrafficModel traffic;
    ChannelModel channel;
    std::uint64_t n_cycles = 16640;
    std::uint64_t seed = 1;
    std::optional<std::string> design_path; // resolved
    std::string oracle = "functional";
    std::size_t alpha_trials = 100;
    std::uint64_t alpha_cycles = 4096;
    bool stats_enabled = true;
    double significance = 0.01;
    TriggerQuad bounds{2, 100, 0.9, 10};
    nlohmann::json grid = nlohmann::json::object();

    HostConfig host_config() const { return {lfsr, window_len}; }
    ExtractorConfig extractor_config() const;
    std::uint64_t alpha_seed() const noexcept;
};

ScenarioConfig default_scenario();

// Validates every field and throws one ConfigError listing each problem as
// "<field>: <message>". Relative design paths resolve against base_dir.
// seed_override replaces the master seed before component seeds are derived.
ScenarioConfig parse_scenario(const nlohmann::json& j, const std::string& base_dir = ".",
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

// Fully explicit config; parse_scenario(scenario_to_json(c)) == c.
nlohmann::json scenario_to_json(const ScenarioConfig& config);

struct RunOptions {
    bool alpha = true;
    bool stats = true;
    bool metrics = true;
    std::size_t workers = 1;
};

struct RunResult {
    nlohmann::json report;
    BitVector received; // channel output
    bool key_recovered = false;
    PayloadDelay delay;
    KeyRecovery recovery;
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// Detection report for an arbitrary received stream.
nlohmann::json detection_report(const KeyRecovery& recovery, const std::optional<Block128>& true_key,
                                bool include_bits);

// Region, measured quad and membership verdict for the configured design.
nlohmann::json compute_metrics(const ScenarioConfig& config, std::size_t workers = 1);

nlohmann::json stats_to_json(const std::vector<stats::TestReport>& reports);

// Raw JSON with dotted-path overrides applied; unknown paths are ConfigError.
nlohmann::json apply_override(const nlohmann::json& base, const std::string& path, const nlohmann::json& value);

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

// Cross product over config["grid"] (keys in sorted order, last key fastest);
// empty grid = one default run. Unknown parameters are rejected before any run.
SweepTable sweep(const nlohmann::json& raw_config, const std::string& base_dir = ".", std::size_t workers = 1,
                 std::optional<std::uint64_t> seed_override = std::nullopt);

std::string dump_report(const nlohmann::json& report);

} // namespace htsim
