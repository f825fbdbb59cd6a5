#include "htsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"
#include "htsim/trojan_host.hpp"

namespace htsim {

using nlohmann::json;

namespace {

constexpr const char* kDefaultKey = "000102030405060708090a0b0c0d0e0f";

enum SeedStream : std::uint64_t { kTrafficSeed = 1, kChannelSeed = 2, kAlphaSeed = 3 };

// Collects field-level problems so a bad config reports all of them at once.
class Reader {
  public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
        if (!obj.is_object()) {
            fail(path.empty() ? "<root>" : path, "must be an object");
            return;
        }
        const std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& [k, _] : obj.items())
            if (!known.count(k)) fail(join(path, k), "unknown field");
    }

    template <typename T>
    std::optional<T> get(const json& obj, const char* key, const std::string& path) {
        if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
        const json& v = obj.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw std::runtime_error("expected a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer() && !v.is_number_unsigned()) throw std::runtime_error("expected an integer");
                if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)
                    throw std::runtime_error("must be non-negative");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::runtime_error("expected a boolean");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::runtime_error("expected a string");
            }
            return v.get<T>();
        } catch (const std::exception& e) {
            fail(join(path, key), e.what());
            return std::nullopt;
        }
    }

    void fail(const std::string& field, const std::string& message) { errors_.push_back(field + ": " + message); }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

  private:
    std::vector<std::string>& errors_;
};

const json& member(const json& obj, const char* key) {
    static const json kEmpty = json::object();
    if (obj.is_object() && obj.contains(key) && obj.at(key).is_object()) return obj.at(key);
    return kEmpty;
}

json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

} // namespace

ExtractorConfig ScenarioConfig::extractor_config() const {
    return ExtractorConfig{lfsr, window_len, lo_threshold, hi_threshold, kBlockBits};
}

std::uint64_t ScenarioConfig::alpha_seed() const noexcept { return derive_seed(seed, kAlphaSeed); }

ScenarioConfig default_scenario() { return parse_scenario(json::object()); }

ScenarioConfig parse_scenario(const json& j, const std::string& base_dir, std::optional<std::uint64_t> seed_override) {
    std::vector<std::string> errors;
    Reader r(errors);
    ScenarioConfig c;
    c.key = parse_block(kDefaultKey);

    r.allow(j, "", {"key", "lfsr", "window_len", "thresholds", "traffic", "channel", "n_cycles", "seed", "design",
                    "oracle", "alpha", "stats", "bounds", "grid"});

    if (j.is_object())
        for (const char* section : {"lfsr", "thresholds", "traffic", "channel", "alpha", "stats", "bounds"})
            if (j.contains(section) && !j.at(section).is_object()) r.fail(section, "must be an object");

    if (auto key = r.get<std::string>(j, "key", "")) {
        try {
            c.key = parse_block(*key);
        } catch (const StructuralError& e) {
            r.fail("key", std::string(e.what()) + " (key_len is 128 bits)");
        }
    }

    {
        const json& l = member(j, "lfsr");
        r.allow(l, "lfsr", {"width", "taps"});
        std::size_t width = r.get<std::size_t>(l, "width", "lfsr").value_or(128);
        std::vector<std::size_t> taps = {0, 1, 6, 127};
        if (l.contains("taps")) {
            if (auto t = r.get<std::vector<std::size_t>>(l, "taps", "lfsr")) taps = *t;
        } else if (width != 128) {
            r.fail("lfsr.taps", "required when width is not 128");
        }
        try {
            c.lfsr = LfsrConfig(width, taps);
        } catch (const StructuralError& e) {
            r.fail("lfsr", e.what());
        }
    }

    c.window_len = r.get<std::size_t>(j, "window_len", "").value_or(128);
    if (c.window_len == 0) r.fail("window_len", "must be positive");

    {
        const json& t = member(j, "thresholds");
        r.allow(t, "thresholds", {"lo", "hi"});
        c.lo_threshold = r.get<std::size_t>(t, "lo", "thresholds").value_or(3);
        c.hi_threshold = r.get<std::size_t>(t, "hi", "thresholds").value_or(125);
        if (c.lo_threshold >= c.hi_threshold) r.fail("thresholds", "lo must be below hi");
        if (c.hi_threshold > c.window_len) r.fail("thresholds.hi", "must not exceed window_len");
    }

    c.seed = seed_override ? *seed_override : r.get<std::uint64_t>(j, "seed", "").value_or(1);

    {
        const json& t = member(j, "traffic");
        r.allow(t, "traffic", {"busy_prob", "burst_len_mean", "seed"});
        c.traffic.busy_prob = r.get<double>(t, "busy_prob", "traffic").value_or(0.0);
        c.traffic.burst_len_mean = r.get<double>(t, "burst_len_mean", "traffic").value_or(128.0);
        c.traffic.seed = r.get<std::uint64_t>(t, "seed", "traffic").value_or(derive_seed(c.seed, kTrafficSeed));
        try {
            c.traffic.validate();
        } catch (const StructuralError& e) {
            r.fail("traffic", e.what());
        }
    }

    {
        const json& ch = member(j, "channel");
        r.allow(ch, "channel", {"flip_prob", "seed"});
        c.channel.flip_prob = r.get<double>(ch, "flip_prob", "channel").value_or(0.0);
        c.channel.seed = r.get<std::uint64_t>(ch, "seed", "channel").value_or(derive_seed(c.seed, kChannelSeed));
        if (!(c.channel.flip_prob >= 0.0 && c.channel.flip_prob <= 1.0))
            r.fail("channel.flip_prob", "must be in [0, 1]");
    }

    c.n_cycles = r.get<std::uint64_t>(j, "n_cycles", "").value_or(16640);
    if (c.n_cycles == 0) r.fail("n_cycles", "must be positive");

    if (auto d = r.get<std::string>(j, "design", "")) {
        std::filesystem::path p(*d);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        if (!std::filesystem::exists(p)) r.fail("design", "file '" + p.string() + "' does not exist");
        c.design_path = std::filesystem::absolute(p).lexically_normal().string();
    }

    c.oracle = r.get<std::string>(j, "oracle", "").value_or("functional");
    {
        const auto& names = oracles::names();
        if (std::find(names.begin(), names.end(), c.oracle) == names.end())
            r.fail("oracle", "unknown oracle '" + c.oracle + "'");
    }

    {
        const json& a = member(j, "alpha");
        r.allow(a, "alpha", {"trials", "n_cycles"});
        c.alpha_trials = r.get<std::size_t>(a, "trials", "alpha").value_or(100);
        c.alpha_cycles = r.get<std::uint64_t>(a, "n_cycles", "alpha").value_or(4096);
        if (c.alpha_trials == 0) r.fail("alpha.trials", "must be positive");
        if (c.alpha_cycles == 0) r.fail("alpha.n_cycles", "must be positive");
    }

    {
        const json& s = member(j, "stats");
        r.allow(s, "stats", {"enabled", "significance"});
        c.stats_enabled = r.get<bool>(s, "enabled", "stats").value_or(true);
        c.significance = r.get<double>(s, "significance", "stats").value_or(0.01);
        try {
            stats::normal_two_sided_critical(c.significance);
        } catch (const StructuralError& e) {
            r.fail("stats.significance", e.what());
        }
    }

    {
        const json& b = member(j, "bounds");
        r.allow(b, "bounds", {"d", "t", "alpha", "l"});
        c.bounds.d = r.get<std::uint64_t>(b, "d", "bounds").value_or(2);
        c.bounds.t = r.get<std::uint64_t>(b, "t", "bounds").value_or(100);
        c.bounds.alpha = r.get<double>(b, "alpha", "bounds").value_or(0.9);
        c.bounds.l = r.get<std::uint64_t>(b, "l", "bounds").value_or(10);
        if (!(c.bounds.alpha >= 0.0 && c.bounds.alpha <= 1.0)) r.fail("bounds.alpha", "must be in [0, 1]");
    }

    if (j.is_object() && j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) {
            r.fail("grid", "must be an object of path -> value list");
        } else {
            for (const auto& [k, v] : g.items())
                if (!v.is_array() || v.empty()) r.fail("grid." + k, "must be a non-empty list");
            c.grid = g;
        }
    }

    if (!errors.empty()) {
        std::ostringstream os;
        os << "invalid scenario config:";
        for (const auto& e : errors) os << "\n  " << e;
        throw ConfigError(os.str());
    }
    return c;
}

ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_scenario(j, dir.empty() ? "." : dir.string(), seed_override);
}

json scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["key"] = to_hex(c.key);
    j["lfsr"] = {{"width", c.lfsr.width()}, {"taps", c.lfsr.taps()}};
    j["window_len"] = c.window_len;
    j["thresholds"] = {{"lo", c.lo_threshold}, {"hi", c.hi_threshold}};
    j["traffic"] = {{"busy_prob", c.traffic.busy_prob},
                    {"burst_len_mean", c.traffic.burst_len_mean},
                    {"seed", c.traffic.seed}};
    j["channel"] = {{"flip_prob", c.channel.flip_prob}, {"seed", c.channel.seed}};
    j["n_cycles"] = c.n_cycles;
    j["seed"] = c.seed;
    j["design"] = c.design_path ? json(*c.design_path) : json(nullptr);
    j["oracle"] = c.oracle;
    j["alpha"] = {{"trials", c.alpha_trials}, {"n_cycles", c.alpha_cycles}};
    j["stats"] = {{"enabled", c.stats_enabled}, {"significance", c.significance}};
    j["bounds"] = {{"d", c.bounds.d}, {"t", c.bounds.t}, {"alpha", c.bounds.alpha}, {"l", c.bounds.l}};
    j["grid"] = c.grid;
    return j;
}

json stats_to_json(const std::vector<stats::TestReport>& reports) {
    json out = json::array();
    for (const auto& r : reports)
        out.push_back({{"test", r.test_name},
                       {"statistic", number_or_string(r.statistic)},
                       {"threshold", r.threshold},
                       {"pass", r.pass},
                       {"n_bits", r.n_bits}});
    return out;
}

json detection_report(const KeyRecovery& rec, const std::optional<Block128>& true_key, bool include_bits) {
    json j;
    j["stream_len"] = rec.stats.stream_len;
    j["detected_bit_count"] = rec.stats.detected.size();
    j["windows"] = {{"bit0", rec.stats.bit0_windows}, {"bit1", rec.stats.bit1_windows},
                    {"nonkey", rec.stats.nonkey_windows}};
    j["histogram"] = rec.stats.histogram;
    if (include_bits) {
        json bits = json::array();
        for (const auto& d : rec.stats.detected) bits.push_back({d.stream_offset, d.bit});
        j["detected_bits"] = std::move(bits);
    }
    if (rec.status == RecoveryStatus::Recovered) {
        j["status"] = "recovered";
        j["key_estimate"] = to_hex(bits_to_block(rec.key_estimate));
        j["alignment"] = {{"cost", rec.alignment.cost},
                          {"dropped", rec.alignment.dropped},
                          {"repeated", rec.alignment.repeated}};
    } else {
        j["status"] = "insufficient_windows";
        j["key_estimate"] = nullptr;
    }
    if (true_key) {
        const bool match = rec.status == RecoveryStatus::Recovered && rec.key_estimate == block_to_bits(*true_key);
        j["match"] = match;
        j["key_bit_errors"] = rec.status == RecoveryStatus::Recovered
                                  ? hamming_distance(rec.key_estimate, block_to_bits(*true_key))
                                  : kBlockBits;
        // Smallest s with estimate[i] == key[i + s]; a nonzero value means the
        // bits are right but the leak's starting point was misjudged.
        j["cyclic_shift"] = nullptr;
        if (rec.status == RecoveryStatus::Recovered) {
            const BitVector truth = block_to_bits(*true_key);
            for (std::size_t shift = 0; shift < truth.size(); ++shift) {
                bool equal = true;
                for (std::size_t i = 0; equal && i < truth.size(); ++i)
                    equal = rec.key_estimate[i] == truth[(i + shift) % truth.size()];
                if (equal) {
                    j["cyclic_shift"] = shift;
                    break;
                }
            }
        }
    }
    return j;
}

namespace {

DesignFile design_for(const ScenarioConfig& c) {
    return c.design_path ? load_design(*c.design_path) : gen_design(default_design_params());
}

json quad_to_json(const TriggerQuad& q) { return {{"d", q.d}, {"t", q.t}, {"alpha", q.alpha}, {"l", q.l}}; }

json alpha_to_json(const AlphaEstimate& a) {
    return {{"alpha", a.alpha},         {"trials", a.trials},
            {"triggered", a.triggered}, {"flagged", a.flagged},
            {"untriggered", a.untriggered}, {"oracle_errors", a.oracle_errors}};
}

json delay_to_json(const PayloadDelay& d, std::uint64_t minimum) {
    return {{"status", to_string(d.status)},
            {"cycles", d.status == PayloadDelay::Status::Measured ? json(d.cycles) : json(nullptr)},
            {"windows_completed", d.windows_completed},
            {"minimum", minimum}};
}

json region_block(const DesignFile& design, const std::optional<PayloadDelay>& delay,
                  const std::optional<AlphaEstimate>& alpha, const TriggerQuad& bounds) {
    json out;
    out["bounds"] = quad_to_json(bounds);
    if (!delay || delay->status != PayloadDelay::Status::Measured || !alpha || design.trigger_sets.empty()) {
        out["region"] = nullptr;
        out["quad"] = nullptr;
        out["member"] = nullptr;
        out["reason"] = design.trigger_sets.empty() ? "design has no trigger sets"
                        : !alpha                     ? "alpha unavailable"
                                                     : "payload delay not measured";
        return out;
    }
    const auto region = achievable_region(design.graph, design.trigger_sets, delay->cycles, alpha->alpha);
    json quads = json::array();
    std::size_t widest = 0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        json q = quad_to_json(region[i]);
        q["label"] = design.trigger_sets[i].label;
        quads.push_back(std::move(q));
        if (region[i].d > region[widest].d) widest = i;
    }
    out["region"] = std::move(quads);
    out["quad"] = quad_to_json(region[widest]);
    out["quad"]["label"] = design.trigger_sets[widest].label;
    out["member"] = class_membership(region, bounds);
    return out;
}

SimulationConfig alpha_sim(const ScenarioConfig& c) {
    return SimulationConfig{c.host_config(), c.key, c.traffic, c.alpha_cycles};
}

std::optional<AlphaEstimate> estimate_alpha(const ScenarioConfig& c, std::size_t workers, json& out) {
    try {
        AlphaEstimate a = implicit_behavior_factor(alpha_sim(c), oracles::by_name(c.oracle), c.alpha_trials,
                                                   c.alpha_seed(), workers);
        out = alpha_to_json(a);
        out["oracle"] = c.oracle;
        out["seed"] = c.alpha_seed();
        return a;
    } catch (const ContractError& e) {
        out = {{"error", e.what()}, {"oracle", c.oracle}, {"seed", c.alpha_seed()}};
        return std::nullopt;
    }
}

} // namespace

RunResult run_scenario(const ScenarioConfig& c, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    RunResult result;
    json& report = result.report;
    report["config"] = scenario_to_json(c);
    report["seeds"] = {{"master", c.seed},
                       {"traffic", c.traffic.seed},
                       {"channel", c.channel.seed},
                       {"alpha", c.alpha_seed()}};

    const TrafficTrace trace = generate_traffic(c.traffic, c.n_cycles);
    const HostRun run = run_host(c.host_config(), c.key, trace, c.n_cycles);
    result.received = apply_channel(run.bits, c.channel);
    result.recovery = recover_key(result.received, c.extractor_config());
    result.key_recovered = result.recovery.status == RecoveryStatus::Recovered &&
                           result.recovery.key_estimate == block_to_bits(c.key);
    result.delay = measure_payload_delay(run.log, kBlockBits);

    report["host"] = {{"cycles", c.n_cycles},
                      {"busy_cycles", trace.busy_count()},
                      {"completed_windows", run.log.windows.size()},
                      {"first_idle_cycle", run.log.first_idle_cycle ? json(*run.log.first_idle_cycle) : json(nullptr)}};
    report["channel_flips"] = hamming_distance(run.bits, result.received);
    report["key_recovered"] = result.key_recovered;
    report["detected_bits"] = result.recovery.stats.detected.size();
    report["detection"] = detection_report(result.recovery, c.key, false);
    report["payload_delay"] = delay_to_json(result.delay, payload_delay_min(kBlockBits, c.window_len));

    if (options.metrics) {
        std::optional<AlphaEstimate> alpha;
        if (options.alpha) {
            json a;
            alpha = estimate_alpha(c, options.workers, a);
            report["alpha"] = std::move(a);
        } else {
            report["alpha"] = nullptr;
        }
        report["metrics"] = region_block(design_for(c), result.delay, alpha, c.bounds);
    }

    if (options.stats && c.stats_enabled) {
        const BitVector idle = idle_output_bits(run);
        if (idle.size() >= stats::kMinBits) {
            report["stats"] = {{"n_bits", idle.size()},
                               {"significance", c.significance},
                               {"tests", stats_to_json(stats::randomness_battery(idle, c.significance))}};
        } else {
            report["stats"] = {{"n_bits", idle.size()},
                               {"skipped", "fewer than " + std::to_string(stats::kMinBits) + " idle output bits"}};
        }
    }

    report["wall_clock_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return result;
}

json compute_metrics(const ScenarioConfig& c, std::size_t workers) {
    const DesignFile design = design_for(c);
    const TrafficTrace trace = generate_traffic(c.traffic, c.n_cycles);
    const HostRun run = run_host(c.host_config(), c.key, trace, c.n_cycles);
    const PayloadDelay delay = measure_payload_delay(run.log, kBlockBits);
    json alpha_json;
    const auto alpha = estimate_alpha(c, workers, alpha_json);
    json out = region_block(design, delay, alpha, c.bounds);
    out["payload_delay"] = delay_to_json(delay, payload_delay_min(kBlockBits, c.window_len));
    out["alpha"] = std::move(alpha_json);
    out["design"] = c.design_path ? json(*c.design_path) : json("<default>");
    return out;
}

json apply_override(const json& base, const std::string& path, const json& value) {
    json out = base;
    json* node = &out;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(key))
            throw ConfigError("grid." + path + ": unknown parameter");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
    return out;
}

std::string SweepTable::to_csv() const {
    std::ostringstream os;
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    };
    write_row(columns);
    for (const auto& r : rows) write_row(r);
    return os.str();
}

namespace {

std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace

SweepTable sweep(const json& raw_config, const std::string& base_dir, std::size_t workers,
                 std::optional<std::uint64_t> seed_override) {
    const ScenarioConfig base = parse_scenario(raw_config, base_dir, seed_override);
    const json schema = scenario_to_json(base);

    std::vector<std::pair<std::string, std::vector<json>>> axes;
    for (const auto& [k, v] : base.grid.items()) {
        if (k == "grid") throw ConfigError("grid.grid: unknown parameter");
        apply_override(schema, k, v.front()); // rejects unknown names up front
        axes.emplace_back(k, std::vector<json>(v.begin(), v.end()));
    }

    // Enumerate cells; last axis varies fastest.
    std::size_t total = 1;
    for (const auto& ax : axes) total *= ax.second.size();
    std::vector<std::vector<json>> cells(total);
    for (std::size_t n = 0; n < total; ++n) {
        std::size_t rem = n;
        cells[n].resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            cells[n][a] = axes[a].second[rem % axes[a].second.size()];
            rem /= axes[a].second.size();
        }
    }

    // Validate every cell before running any of them.
    json raw = raw_config.is_object() ? raw_config : json::object();
    raw.erase("grid");
    std::vector<ScenarioConfig> configs;
    for (const auto& values : cells) {
        json cfg = raw;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            // Paths are checked against the full schema; materialize missing parents.
            json* node = &cfg;
            const std::string& path = axes[a].first;
            std::size_t start = 0;
            while (true) {
                const std::size_t dot = path.find('.', start);
                const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
                if (dot == std::string::npos) {
                    (*node)[key] = values[a];
                    break;
                }
                if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
                node = &(*node)[key];
                start = dot + 1;
            }
        }
        const bool seed_in_grid = std::any_of(axes.begin(), axes.end(), [](const auto& ax) { return ax.first == "seed"; });
        configs.push_back(parse_scenario(cfg, base_dir, seed_in_grid ? std::nullopt : seed_override));
    }

    SweepTable table;
    for (const auto& ax : axes) table.columns.push_back(ax.first);
    for (const char* col : {"key_recovered", "t_status", "t", "detected_bits", "key_bit_errors", "bit0_windows",
                            "bit1_windows", "nonkey_windows"})
        table.columns.emplace_back(col);

    std::vector<std::vector<std::string>> rows(configs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                const RunResult r = run_scenario(configs[i], RunOptions{false, false, false, 1});
                std::vector<std::string> row;
                for (const auto& v : cells[i]) row.push_back(cell(v));
                row.push_back(r.key_recovered ? "true" : "false");
                row.push_back(to_string(r.delay.status));
                row.push_back(r.delay.status == PayloadDelay::Status::Measured ? std::to_string(r.delay.cycles) : "");
                row.push_back(std::to_string(r.recovery.stats.detected.size()));
                const auto& det = r.report.at("detection");
                row.push_back(std::to_string(det.at("key_bit_errors").get<std::size_t>()));
                row.push_back(std::to_string(r.recovery.stats.bit0_windows));
                row.push_back(std::to_string(r.recovery.stats.bit1_windows));
                row.push_back(std::to_string(r.recovery.stats.nonkey_windows));
                rows[i] = std::move(row);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, configs.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    table.rows = std::move(rows);
    return table;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

} // namespace htsim
