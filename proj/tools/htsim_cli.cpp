// htsim: command-line harness for the scrambler key-leak Trojan simulator.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime contract violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "htsim/bitstream_io.hpp"
#include "htsim/design_graph.hpp"
#include "htsim/errors.hpp"
#include "htsim/extractor.hpp"
#include "htsim/scenario.hpp"
#include "htsim/stats.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw htsim::ConfigError("--out: cannot write '" + path + "'");
    out << text;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw htsim::ConfigError("config: cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw htsim::ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dir_of(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path();
    return dir.empty() ? "." : dir.string();
}

htsim::ScenarioConfig scenario_from(const std::string& path, std::optional<std::uint64_t> seed) {
    if (path.empty()) return htsim::parse_scenario(nlohmann::json::object(), ".", seed);
    return htsim::load_scenario(path, seed);
}

htsim::BitVector load_bits(const std::string& path) {
    try {
        return htsim::read_bitstream(path);
    } catch (const htsim::StructuralError& e) {
        throw htsim::ConfigError(std::string("--bits: ") + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycle-accurate simulator and analyzer for a scrambler-based key-leak hardware Trojan"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string bits_path;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "Scenario config (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--out", out_path, "Output path (default: stdout)");
        sub->add_option("--seed", seed, "Override the master seed");
        sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "Run one end-to-end scenario and write a JSON report");
    add_common(simulate, false);
    simulate->add_option("--bits", bits_path, "Also write the received bitstream here");

    auto* extract = app.add_subcommand("extract", "Run the key extractor over a recorded bitstream");
    add_common(extract, false);
    extract->add_option("--bits", bits_path, "Received bitstream file")->required();

    auto* metrics = app.add_subcommand("metrics", "Compute the trigger-parameter region and membership verdict");
    add_common(metrics, false);

    auto* stats_cmd = app.add_subcommand("stats", "Randomness battery over a bitstream file");
    add_common(stats_cmd, false);
    stats_cmd->add_option("--bits", bits_path, "Bitstream file")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Cross-product parameter sweep, CSV output");
    add_common(sweep_cmd, true);

    auto* gen = app.add_subcommand("gen-design", "Generate a design-graph file");
    add_common(gen, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            const auto cfg = scenario_from(config_path, seed);
            htsim::RunOptions opts;
            opts.workers = workers;
            const auto result = htsim::run_scenario(cfg, opts);
            if (!bits_path.empty()) htsim::write_bitstream(bits_path, result.received);
            write_text(out_path, htsim::dump_report(result.report));
            std::cerr << "key_recovered=" << (result.key_recovered ? "true" : "false")
                      << " t=" << htsim::to_string(result.delay.status);
            if (result.delay.status == htsim::PayloadDelay::Status::Measured) std::cerr << ":" << result.delay.cycles;
            std::cerr << '\n';
        } else if (extract->parsed()) {
            const auto cfg = scenario_from(config_path, seed);
            const auto bits = load_bits(bits_path);
            const auto rec = htsim::recover_key(bits, cfg.extractor_config());
            const auto report = htsim::detection_report(rec, cfg.key, true);
            write_text(out_path, htsim::dump_report(report));
            std::cerr << "status=" << report.at("status").get<std::string>()
                      << " match=" << (report.at("match").get<bool>() ? "true" : "false") << '\n';
        } else if (metrics->parsed()) {
            const auto cfg = scenario_from(config_path, seed);
            const auto report = htsim::compute_metrics(cfg, workers);
            write_text(out_path, htsim::dump_report(report));
            const auto& member = report.at("member");
            std::cout << "H_{d,t,alpha,l} membership for bounds " << report.at("bounds").dump() << ": "
                      << (member.is_null() ? "undetermined" : (member.get<bool>() ? "MEMBER" : "NOT A MEMBER"))
                      << '\n';
        } else if (stats_cmd->parsed()) {
            const double significance = config_path.empty() ? 0.01 : scenario_from(config_path, seed).significance;
            const auto bits = load_bits(bits_path);
            const auto reports = htsim::stats::randomness_battery(bits, significance);
            std::cout << htsim::stats::format_table(reports);
            if (!out_path.empty())
                write_text(out_path, htsim::dump_report({{"significance", significance},
                                                         {"tests", htsim::stats_to_json(reports)}}));
        } else if (sweep_cmd->parsed()) {
            const auto table = htsim::sweep(read_json(config_path), dir_of(config_path), workers, seed);
            write_text(out_path, table.to_csv());
        } else if (gen->parsed()) {
            htsim::DesignParams params = htsim::default_design_params();
            if (!config_path.empty()) {
                try {
                    params = htsim::design_params_from_json(read_json(config_path));
                } catch (const htsim::StructuralError& e) {
                    throw htsim::ConfigError(e.what());
                }
            }
            if (seed) params.seed = *seed;
            htsim::DesignFile design = [&] {
                try {
                    return htsim::gen_design(params);
                } catch (const htsim::StructuralError& e) {
                    throw htsim::ConfigError(e.what());
                }
            }();
            write_text(out_path, htsim::dump_report(htsim::design_to_json(design)));
        }
    } catch (const htsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
