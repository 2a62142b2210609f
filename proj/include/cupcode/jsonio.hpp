#pragma once

// JSON serialization for complexes, codes, experiment reports, and compiled
// circuits, plus the run configuration consumed by the command-line driver.
// Every emitter uses insertion-ordered objects and sorted maps so identical
// inputs always produce byte-identical output.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cupcode/cell_complex.hpp"
#include "cupcode/diagop.hpp"
#include "cupcode/stab_code.hpp"
#include "cupcode/verify.hpp"

namespace cupcode {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Report& rep) {
    ordered_json j;
    j["schema"] = 1;
    j["experiment"] = rep.experiment;
    j["instance"] = rep.instance;
    j["pass"] = rep.pass;
    ordered_json counters = ordered_json::object();
    for (const auto& [k, v] : rep.counters)
        counters[k] = v;
    j["counters"] = counters;
    ordered_json table = ordered_json::array();
    for (const auto& [from, to] : rep.table)
        table.push_back(ordered_json::array({from, to}));
    j["table"] = table;
    j["notes"] = rep.notes;
    j["witnesses"] = rep.witnesses;
    return j;
}

inline ordered_json to_json(const CellComplex& cx) {
    ordered_json j;
    j["schema"] = 1;
    j["name"] = cx.name;
    j["kind"] = cx.kind == ComplexKind::simplicial ? "simplicial" : "cubical";
    j["dim"] = cx.dim;
    ordered_json counts = ordered_json::array();
    for (int d = 0; d <= cx.dim; ++d)
        counts.push_back(cx.ncells(d));
    j["counts"] = counts;
    ordered_json layers = ordered_json::array();
    for (int d = 0; d <= cx.dim; ++d) {
        ordered_json layer = ordered_json::array();
        for (const Cell& c : cx.cells[d]) {
            ordered_json cell;
            cell["verts"] = c.verts;
            cell["faces"] = c.faces;
            if (cx.kind == ComplexKind::cubical)
                cell["axes"] = c.axes;
            cell["region"] = c.region;
            cell["sign"] = c.sign;
            layer.push_back(cell);
        }
        layers.push_back(layer);
    }
    j["cells"] = layers;
    return j;
}

namespace detail {

inline ordered_json support_json(const std::vector<std::pair<int, int>>& sup) {
    ordered_json a = ordered_json::array();
    for (auto [e, c] : sup)
        a.push_back(ordered_json::array({e, c}));
    return a;
}

} // namespace detail

inline ordered_json to_json(const Code& code) {
    ordered_json j;
    j["schema"] = 1;
    j["name"] = code.name;
    j["complex"] = code.cx().name;
    j["colors"] = code.colors;
    j["twisted"] = code.twisted;
    j["nqubits"] = code.nqubits();
    ordered_json rows = ordered_json::object();
    for (const auto& [region, masks] : code.boundary_rows)
        rows[region] = masks;
    j["boundary_rows"] = rows;
    ordered_json xg = ordered_json::array();
    for (const StabilizerGenerator& g : code.xgens) {
        ordered_json e;
        e["label"] = g.label;
        e["anchor"] = g.anchor;
        e["colors"] = g.colors;
        e["x_layer"] = detail::support_json(g.x_layer);
        xg.push_back(e);
    }
    j["x_generators"] = xg;
    ordered_json zg = ordered_json::array();
    for (const StabilizerGenerator& g : code.zgens) {
        ordered_json e;
        e["label"] = g.label;
        e["anchor"] = g.anchor;
        e["colors"] = g.colors;
        e["z_support"] = detail::support_json(g.z_support);
        zg.push_back(e);
    }
    j["z_generators"] = zg;
    ordered_json ls = ordered_json::array();
    for (const auto& sup : code.logical_zs)
        ls.push_back(detail::support_json(sup));
    j["logical_zs"] = ls;
    return j;
}

inline ordered_json to_json(const CompiledGates& g, const std::string& opname) {
    ordered_json j;
    j["schema"] = 1;
    j["op"] = opname;
    j["global_phase_exp"] = g.global_phase_exp;
    ordered_json gates = ordered_json::array();
    for (const Gate& gate : g.gates) {
        ordered_json e;
        e["name"] = gate.name;
        e["vars"] = detail::support_json(gate.vars);
        gates.push_back(e);
    }
    j["gates"] = gates;
    return j;
}

inline ordered_json to_json(const CnotLayer& v, const CellComplex& cx) {
    ordered_json j;
    j["schema"] = 1;
    j["op"] = "V";
    ordered_json pairs = ordered_json::array();
    for (auto [a, b] : v.pairs)
        pairs.push_back(ordered_json::array({a, b}));
    j["color_pairs"] = pairs;
    // transversal expansion: the full layer is this list applied in order
    ordered_json cnots = ordered_json::array();
    for (auto [a, b] : v.pairs)
        for (int e = 0; e < cx.ncells(1); ++e) {
            ordered_json c;
            c["edge"] = e;
            c["control_color"] = a;
            c["target_color"] = b;
            cnots.push_back(c);
        }
    j["cnots"] = cnots;
    return j;
}

// ---------------------------------------------------------------------------
// Run configuration: instance selector plus the experiment list, seed, and
// output path. Unknown fields and unknown experiment ids are rejected at
// parse time.

struct RunConfig {
    std::string instance = "2d"; // 2d | 3d | bilayer | torus2d | torus3d
    int size = 1;
    int refinement = 1;
    std::vector<std::string> experiments;
    std::uint64_t seed = 0;
    std::string out;
    int jobs = 1;
};

inline const std::vector<std::string>& experiment_registry() {
    static const std::vector<std::string> ids = {
        "check-stabilizers", "check-symmetry", "logical-action", "anyons",
        "gsd",               "dw",             "code-switch",
    };
    return ids;
}

inline const std::vector<std::string>& instance_registry() {
    static const std::vector<std::string> kinds = {"2d", "3d", "bilayer", "torus2d", "torus3d"};
    return kinds;
}

inline RunConfig run_config_from_json(const ordered_json& j, RunConfig rc = RunConfig{}) {
    if (!j.is_object())
        throw std::runtime_error("run config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const ordered_json& v = it.value();
        if (key == "schema") {
            if (!v.is_number_integer() || v.get<int>() != 1)
                throw std::runtime_error("run config: unsupported schema");
        } else if (key == "instance") {
            rc.instance = v.get<std::string>();
        } else if (key == "size") {
            rc.size = v.get<int>();
        } else if (key == "refinement") {
            rc.refinement = v.get<int>();
        } else if (key == "experiments") {
            if (!v.is_array())
                throw std::runtime_error("run config: experiments must be an array");
            for (const auto& e : v)
                rc.experiments.push_back(e.get<std::string>());
        } else if (key == "seed") {
            rc.seed = v.get<std::uint64_t>();
        } else if (key == "out") {
            rc.out = v.get<std::string>();
        } else if (key == "jobs") {
            rc.jobs = v.get<int>();
        } else {
            throw std::runtime_error("run config: unknown field '" + key + "'");
        }
    }
    const auto& kinds = instance_registry();
    if (std::find(kinds.begin(), kinds.end(), rc.instance) == kinds.end())
        throw std::runtime_error("run config: unknown instance kind '" + rc.instance + "'");
    const auto& ids = experiment_registry();
    for (const std::string& e : rc.experiments)
        if (std::find(ids.begin(), ids.end(), e) == ids.end())
            throw std::runtime_error("run config: unknown experiment id '" + e + "'");
    if (rc.size < 1 || rc.refinement < 1 || rc.jobs < 1)
        throw std::runtime_error("run config: size, refinement, and jobs must be positive");
    return rc;
}

} // namespace cupcode
