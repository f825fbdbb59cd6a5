#include "htsim/design_graph.hpp"

#include <fstream>
#include <set>

#include "htsim/errors.hpp"
#include "htsim/rng.hpp"

namespace htsim {

using nlohmann::json;

DesignGraph::DesignGraph(std::vector<ModuleInfo> modules, std::vector<Wire> wires)
    : modules_(std::move(modules)), wires_(std::move(wires)) {
    for (std::size_t i = 0; i < modules_.size(); ++i) {
        const auto& m = modules_[i];
        if (m.bbox.x0 > m.bbox.x1 || m.bbox.y0 > m.bbox.y1)
            throw StructuralError("module '" + m.name + "' has an inverted bounding box");
        if (!module_index_.emplace(m.name, i).second) throw StructuralError("duplicate module '" + m.name + "'");
        module_wires_[m.name];
    }
    for (std::size_t i = 0; i < wires_.size(); ++i) {
        const auto& w = wires_[i];
        if (!wire_index_.emplace(w.id, i).second) throw StructuralError("duplicate wire id '" + w.id + "'");
        auto mod = module_index_.find(w.module);
        if (mod == module_index_.end())
            throw StructuralError("wire '" + w.id + "' references unknown module '" + w.module + "'");
        if (w.placement && !modules_[mod->second].bbox.contains(*w.placement))
            throw StructuralError("wire '" + w.id + "' placed outside module '" + w.module + "'");
        module_wires_[w.module].push_back(i);
    }
    for (const auto& m : modules_)
        if (module_wires_[m.name].size() > m.declared_wire_count)
            throw StructuralError("module '" + m.name + "' lists " + std::to_string(module_wires_[m.name].size()) +
                                  " wires but declares " + std::to_string(m.declared_wire_count));
}

const Wire* DesignGraph::find_wire(const std::string& id) const {
    auto it = wire_index_.find(id);
    return it == wire_index_.end() ? nullptr : &wires_[it->second];
}

const ModuleInfo* DesignGraph::find_module(const std::string& name) const {
    auto it = module_index_.find(name);
    return it == module_index_.end() ? nullptr : &modules_[it->second];
}

const std::vector<std::size_t>& DesignGraph::wires_of(const std::string& module) const {
    auto it = module_wires_.find(module);
    if (it == module_wires_.end()) throw StructuralError("unknown module '" + module + "'");
    return it->second;
}

void DesignGraph::check(const TriggerStateSet& set) const {
    for (const auto& id : set.wire_ids)
        if (!find_wire(id)) throw StructuralError("trigger set '" + set.label + "': unknown wire '" + id + "'");
    for (const auto& m : set.modules)
        if (!find_module(m)) throw StructuralError("trigger set '" + set.label + "': unknown module '" + m + "'");
}

namespace {

BoundingBox bbox_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw StructuralError("bbox must be [x0, y0, x1, y1]");
    return BoundingBox{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
                       j[3].get<std::int64_t>()};
}

json bbox_to_json(const BoundingBox& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

std::vector<TriggerStateSet> trigger_sets_from_json(const json& j) {
    std::vector<TriggerStateSet> sets;
    if (j.is_null()) return sets;
    for (const auto& s : j) {
        TriggerStateSet set;
        set.label = s.at("label").get<std::string>();
        if (s.contains("wires")) set.wire_ids = s.at("wires").get<std::vector<std::string>>();
        if (s.contains("modules")) set.modules = s.at("modules").get<std::vector<std::string>>();
        sets.push_back(std::move(set));
    }
    return sets;
}

json trigger_sets_to_json(const std::vector<TriggerStateSet>& sets) {
    json out = json::array();
    for (const auto& s : sets) out.push_back({{"label", s.label}, {"wires", s.wire_ids}, {"modules", s.modules}});
    return out;
}

// nlohmann's type errors become StructuralError so callers see one error family.
template <typename F>
auto rethrow_json(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw StructuralError(std::string(what) + ": " + e.what());
    }
}

} // namespace

DesignFile design_from_json(const json& j) {
    return rethrow_json("design file", [&] {
        std::vector<ModuleInfo> modules;
        for (const auto& m : j.at("modules"))
            modules.push_back({m.at("name").get<std::string>(), m.at("declared_wire_count").get<std::uint64_t>(),
                               bbox_from_json(m.at("bbox"))});
        std::vector<Wire> wires;
        for (const auto& w : j.at("wires")) {
            Wire wire{w.at("id").get<std::string>(), std::nullopt, w.at("module").get<std::string>()};
            if (w.contains("x") != w.contains("y"))
                throw StructuralError("wire '" + wire.id + "' must give both x and y or neither");
            if (w.contains("x")) wire.placement = Point{w.at("x").get<std::int64_t>(), w.at("y").get<std::int64_t>()};
            wires.push_back(std::move(wire));
        }
        DesignFile file{DesignGraph(std::move(modules), std::move(wires)),
                        trigger_sets_from_json(j.value("trigger_sets", json()))};
        for (const auto& s : file.trigger_sets) file.graph.check(s);
        return file;
    });
}

json design_to_json(const DesignFile& design) {
    json modules = json::array();
    for (const auto& m : design.graph.modules())
        modules.push_back(
            {{"name", m.name}, {"declared_wire_count", m.declared_wire_count}, {"bbox", bbox_to_json(m.bbox)}});
    json wires = json::array();
    for (const auto& w : design.graph.wires()) {
        json jw = {{"id", w.id}, {"module", w.module}};
        if (w.placement) {
            jw["x"] = w.placement->x;
            jw["y"] = w.placement->y;
        }
        wires.push_back(std::move(jw));
    }
    return {{"modules", modules}, {"wires", wires}, {"trigger_sets", trigger_sets_to_json(design.trigger_sets)}};
}

DesignFile load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open design file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw StructuralError("design file '" + path + "' is not valid JSON: " + e.what());
    }
    return design_from_json(j);
}

DesignParams default_design_params() {
    DesignParams p;
    p.modules = {
        {"aes_core", 24576, 512, {0, 0, 2000, 1600}},
        {"trojan_ctrl", 420, 64, {2100, 0, 2300, 200}},
        {"output_mux", 3, 3, {2100, 300, 2140, 340}},
    };
    p.trigger_sets = {
        {"whole_aes", {}, {"aes_core"}},
        {"plaintext_valid", {"trojan_ctrl/w0"}, {}},
    };
    p.seed = 2017;
    return p;
}

DesignParams design_params_from_json(const json& j) {
    return rethrow_json("design params", [&] {
        DesignParams p;
        for (const auto& m : j.at("modules"))
            p.modules.push_back({m.at("name").get<std::string>(), m.at("declared_wire_count").get<std::uint64_t>(),
                                 m.at("placed_wires").get<std::uint64_t>(), bbox_from_json(m.at("bbox"))});
        p.trigger_sets = trigger_sets_from_json(j.value("trigger_sets", json()));
        p.seed = j.value("seed", std::uint64_t{0});
        return p;
    });
}

json design_params_to_json(const DesignParams& p) {
    json modules = json::array();
    for (const auto& m : p.modules)
        modules.push_back({{"name", m.name},
                           {"declared_wire_count", m.declared_wire_count},
                           {"placed_wires", m.placed_wires},
                           {"bbox", bbox_to_json(m.bbox)}});
    return {{"modules", modules}, {"trigger_sets", trigger_sets_to_json(p.trigger_sets)}, {"seed", p.seed}};
}

DesignFile gen_design(const DesignParams& params) {
    if (params.modules.empty()) throw StructuralError("design needs at least one module");
    for (std::size_t i = 0; i < params.modules.size(); ++i) {
        const auto& m = params.modules[i];
        if (m.placed_wires == 0 || m.declared_wire_count == 0)
            throw StructuralError("module '" + m.name + "' needs positive wire counts");
        if (m.placed_wires > m.declared_wire_count)
            throw StructuralError("module '" + m.name + "' places more wires than it declares");
        for (std::size_t k = 0; k < i; ++k)
            if (m.bbox.overlaps(params.modules[k].bbox))
                throw StructuralError("module boxes '" + params.modules[k].name + "' and '" + m.name + "' overlap");
    }

    Rng rng(params.seed);
    std::vector<ModuleInfo> modules;
    std::vector<Wire> wires;
    for (const auto& m : params.modules) {
        modules.push_back({m.name, m.declared_wire_count, m.bbox});
        const auto w = static_cast<std::uint64_t>(m.bbox.x1 - m.bbox.x0) + 1;
        const auto h = static_cast<std::uint64_t>(m.bbox.y1 - m.bbox.y0) + 1;
        for (std::uint64_t i = 0; i < m.placed_wires; ++i) {
            Point p{m.bbox.x0 + static_cast<std::int64_t>(rng.uniform_below(w)),
                    m.bbox.y0 + static_cast<std::int64_t>(rng.uniform_below(h))};
            wires.push_back({m.name + "/w" + std::to_string(i), p, m.name});
        }
    }
    DesignFile file{DesignGraph(std::move(modules), std::move(wires)), params.trigger_sets};
    for (const auto& s : file.trigger_sets) file.graph.check(s);
    return file;
}

} // namespace htsim
