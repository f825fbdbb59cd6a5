#pragma once

// Abstract placement-level view of the IP core: wires with optional
// placements grouped into modules. Macros (the AES block) may declare more
// wires than are individually placed; the unplaced remainder is represented
// by the module bounding box.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace htsim {

struct Point {
    std::int64_t x = 0;
    std::int64_t y = 0;

    bool operator==(const Point&) const = default;
};

struct BoundingBox {
    std::int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0; // inclusive corners, x0 <= x1, y0 <= y1

    bool contains(const Point& p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool overlaps(const BoundingBox& o) const noexcept {
        return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
    }
    std::int64_t semi_perimeter() const noexcept { return (x1 - x0) + (y1 - y0); }

    bool operator==(const BoundingBox&) const = default;
};

struct Wire {
    std::string id;
    std::optional<Point> placement;
    std::string module;
};

struct ModuleInfo {
    std::string name;
    std::uint64_t declared_wire_count = 0;
    BoundingBox bbox;
};

// Explicit wires plus whole-module references.
struct TriggerStateSet {
    std::string label;
    std::vector<std::string> wire_ids;
    std::vector<std::string> modules;
};

class DesignGraph {
  public:
    // Throws StructuralError on duplicate ids, unknown modules, placements
    // outside their module box, or more listed wires than declared.
    DesignGraph(std::vector<ModuleInfo> modules, std::vector<Wire> wires);

    const std::vector<ModuleInfo>& modules() const noexcept { return modules_; }
    const std::vector<Wire>& wires() const noexcept { return wires_; }

    const Wire* find_wire(const std::string& id) const;
    const ModuleInfo* find_module(const std::string& name) const;
    // Indices into wires() belonging to a module.
    const std::vector<std::size_t>& wires_of(const std::string& module) const;

    // Throws StructuralError if the set references unknown wires or modules.
    void check(const TriggerStateSet& set) const;

  private:
    std::vector<ModuleInfo> modules_;
    std::vector<Wire> wires_;
    std::map<std::string, std::size_t> wire_index_;
    std::map<std::string, std::size_t> module_index_;
    std::map<std::string, std::vector<std::size_t>> module_wires_;
};

struct DesignFile {
    DesignGraph graph;
    std::vector<TriggerStateSet> trigger_sets;
};

// JSON schema:
// { "modules": [{"name", "declared_wire_count", "bbox": [x0, y0, x1, y1]}],
//   "wires": [{"id", "x", "y", "module"}]            (x/y may be omitted: unplaced)
//   "trigger_sets": [{"label", "wires": [...], "modules": [...]}] }
DesignFile design_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const DesignFile& design);
DesignFile load_design(const std::string& path);

struct ModuleSpec {
    std::string name;
    std::uint64_t declared_wire_count = 0;
    std::uint64_t placed_wires = 0;
    BoundingBox bbox;
};

struct DesignParams {
    std::vector<ModuleSpec> modules;
    std::vector<TriggerStateSet> trigger_sets;
    std::uint64_t seed = 0;
};

// The Trojan-bearing core: a large AES macro, the scrambler/sequencer
// control block and the output mux. Trigger sets: the whole AES block, and a
// conventional single-wire "plaintext valid" view.
DesignParams default_design_params();

DesignParams design_params_from_json(const nlohmann::json& j);
nlohmann::json design_params_to_json(const DesignParams& p);

// Places each module's wires uniformly inside its box, ids "<module>/w<i>".
// Throws StructuralError for overlapping boxes or zero counts.
DesignFile gen_design(const DesignParams& params);

} // namespace htsim
