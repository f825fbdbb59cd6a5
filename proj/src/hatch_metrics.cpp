#include "htsim/hatch_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <thread>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"

namespace htsim {

void TriggerQuad::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw StructuralError("quad alpha must lie in [0, 1]");
}

std::uint64_t trigger_dimension(const DesignGraph& design, const TriggerStateSet& set) {
    design.check(set);
    const std::set<std::string> whole(set.modules.begin(), set.modules.end());
    std::uint64_t d = 0;
    for (const auto& m : whole) d += design.find_module(m)->declared_wire_count;
    const std::set<std::string> explicit_ids(set.wire_ids.begin(), set.wire_ids.end());
    for (const auto& id : explicit_ids)
        if (!whole.count(design.find_wire(id)->module)) ++d;
    return d;
}

std::uint64_t trigger_locality(const DesignGraph& design, const TriggerStateSet& set) {
    design.check(set);
    std::vector<Point> points;
    for (const auto& id : set.wire_ids) {
        const Wire* w = design.find_wire(id);
        if (!w->placement) throw StructuralError("trigger set '" + set.label + "': wire '" + id + "' has no placement");
        points.push_back(*w->placement);
    }
    for (const auto& name : set.modules) {
        const ModuleInfo* m = design.find_module(name);
        std::uint64_t placed = 0;
        for (auto idx : design.wires_of(name)) {
            const auto& w = design.wires()[idx];
            if (w.placement) {
                points.push_back(*w.placement);
                ++placed;
            }
        }
        if (placed < m->declared_wire_count) {
            const auto& b = m->bbox;
            points.insert(points.end(), {{b.x0, b.y0}, {b.x0, b.y1}, {b.x1, b.y0}, {b.x1, b.y1}});
        }
    }
    if (points.size() < 2) return 0;

    // max |dx| + |dy| = max over the rotated coordinates u = x + y, v = x - y.
    std::int64_t umin = std::numeric_limits<std::int64_t>::max(), umax = std::numeric_limits<std::int64_t>::min();
    std::int64_t vmin = umin, vmax = umax;
    for (const auto& p : points) {
        umin = std::min(umin, p.x + p.y);
        umax = std::max(umax, p.x + p.y);
        vmin = std::min(vmin, p.x - p.y);
        vmax = std::max(vmax, p.x - p.y);
    }
    return static_cast<std::uint64_t>(std::max(umax - umin, vmax - vmin));
}

std::uint64_t payload_delay_min(std::uint64_t key_len, std::uint64_t window_len) {
    if (key_len == 0 || window_len == 0) throw StructuralError("payload_delay_min needs positive inputs");
    return key_len * window_len;
}

const char* to_string(PayloadDelay::Status s) noexcept {
    switch (s) {
    case PayloadDelay::Status::Measured: return "measured";
    case PayloadDelay::Status::Incomplete: return "incomplete";
    case PayloadDelay::Status::NeverTriggered: return "never_triggered";
    }
    return "?";
}

PayloadDelay measure_payload_delay(const TriggerLog& log, std::size_t key_len) {
    if (key_len == 0) throw StructuralError("key_len must be positive");
    PayloadDelay r;
    r.windows_completed = log.windows.size();
    if (!log.first_idle_cycle) return r;
    if (log.windows.size() < key_len) {
        r.status = PayloadDelay::Status::Incomplete;
        return r;
    }
    r.status = PayloadDelay::Status::Measured;
    r.cycles = log.windows[key_len - 1].cycle - *log.first_idle_cycle + 1;
    return r;
}

bool class_membership(std::span<const TriggerQuad> region, const TriggerQuad& bounds) {
    if (region.empty()) throw StructuralError("class_membership: empty achievable region");
    return std::any_of(region.begin(), region.end(), [&](const TriggerQuad& q) {
        return q.d <= bounds.d && q.t <= bounds.t && q.alpha <= bounds.alpha && q.l <= bounds.l;
    });
}

namespace oracles {

TesterOracle functional_correctness() {
    return [](const TrafficTrace& trace, const HostRun& run, const GoldenModel& golden) {
        std::size_t block = 0;
        BitVector expected;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < run.bits.size(); ++i) {
            if (!trace.busy[i]) continue;
            if (pos == expected.size()) {
                if (block >= trace.plaintexts.size()) return true;
                expected = block_to_bits(golden.encrypt(trace.plaintexts[block++]));
                pos = 0;
            }
            if (run.bits[i] != expected[pos++]) return true;
        }
        return false;
    };
}

TesterOracle always_flag() {
    return [](const TrafficTrace&, const HostRun&, const GoldenModel&) { return true; };
}

TesterOracle never_flag() {
    return [](const TrafficTrace&, const HostRun&, const GoldenModel&) { return false; };
}

TesterOracle idle_quiet() {
    return [](const TrafficTrace& trace, const HostRun& run, const GoldenModel&) {
        for (std::size_t i = 0; i < run.bits.size(); ++i)
            if (!trace.busy[i] && run.bits[i]) return true;
        return false;
    };
}

const std::vector<std::string>& names() {
    static const std::vector<std::string> kNames = {"functional", "always-flag", "never-flag", "idle-quiet"};
    return kNames;
}

TesterOracle by_name(const std::string& name) {
    if (name == "functional") return functional_correctness();
    if (name == "always-flag") return always_flag();
    if (name == "never-flag") return never_flag();
    if (name == "idle-quiet") return idle_quiet();
    throw StructuralError("unknown oracle '" + name + "'");
}

} // namespace oracles

namespace {

enum class TrialOutcome { Untriggered, Flagged, Clean, OracleError };

TrialOutcome run_trial(const SimulationConfig& sim, const TesterOracle& oracle, const GoldenModel& golden,
                       std::uint64_t trial_seed) {
    TrafficModel model = sim.traffic;
    model.seed = trial_seed;
    const TrafficTrace trace = generate_traffic(model, sim.n_cycles);
    const HostRun run = run_host(sim.host, sim.key, trace, sim.n_cycles);
    if (!run.log.first_idle_cycle) return TrialOutcome::Untriggered;
    try {
        return oracle(trace, run, golden) ? TrialOutcome::Flagged : TrialOutcome::Clean;
    } catch (const std::exception&) {
        return TrialOutcome::OracleError;
    }
}

} // namespace

AlphaEstimate implicit_behavior_factor(const SimulationConfig& sim, const TesterOracle& oracle,
                                       std::size_t n_trials, std::uint64_t seed, std::size_t workers) {
    if (n_trials == 0) throw StructuralError("implicit_behavior_factor needs n_trials >= 1");
    if (sim.n_cycles == 0) throw StructuralError("implicit_behavior_factor needs n_cycles >= 1");
    if (!oracle) throw StructuralError("implicit_behavior_factor: no oracle");
    sim.traffic.validate();

    const GoldenModel golden(sim.key);
    std::vector<TrialOutcome> outcomes(n_trials, TrialOutcome::Untriggered);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_trials; i = next++)
            outcomes[i] = run_trial(sim, oracle, golden, derive_seed(seed, i));
    };
    const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, n_trials);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    AlphaEstimate est;
    est.trials = n_trials;
    for (auto o : outcomes) {
        switch (o) {
        case TrialOutcome::Untriggered: ++est.untriggered; break;
        case TrialOutcome::Flagged: ++est.triggered; ++est.flagged; break;
        case TrialOutcome::Clean: ++est.triggered; break;
        case TrialOutcome::OracleError: ++est.oracle_errors; break;
        }
    }
    if (est.triggered == 0) throw ContractError("implicit_behavior_factor: no trial triggered the Trojan");
    est.alpha = static_cast<double>(est.triggered - est.flagged) / static_cast<double>(est.triggered);
    return est;
}

std::vector<TriggerQuad> achievable_region(const DesignGraph& design, std::span<const TriggerStateSet> sets,
                                           std::uint64_t t, double alpha) {
    if (sets.empty()) throw StructuralError("achievable_region needs at least one trigger set");
    std::vector<TriggerQuad> region;
    region.reserve(sets.size());
    for (const auto& s : sets) {
        TriggerQuad q{trigger_dimension(design, s), t, alpha, trigger_locality(design, s)};
        q.validate();
        region.push_back(q);
    }
    return region;
}

std::vector<TriggerQuad> achievable_region(const DesignGraph& design, std::span<const TriggerStateSet> sets,
                                           const SimulationConfig& sim, const AlphaSettings& alpha) {
    if (sets.empty()) throw StructuralError("achievable_region needs at least one trigger set");
    const TrafficTrace trace = generate_traffic(sim.traffic, sim.n_cycles);
    const HostRun run = run_host(sim.host, sim.key, trace, sim.n_cycles);
    const PayloadDelay t = measure_payload_delay(run.log, KeyMaterial::from_block(sim.key).size());
    if (t.status != PayloadDelay::Status::Measured)
        throw ContractError(std::string("payload delay ") + to_string(t.status) + " after " +
                            std::to_string(sim.n_cycles) + " cycles");
    const AlphaEstimate a = implicit_behavior_factor(sim, alpha.oracle, alpha.trials, alpha.seed, alpha.workers);
    return achievable_region(design, sets, t.cycles, a.alpha);
}

} // namespace htsim
