#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rva/model_check.hpp"
#include "rva/scenario.hpp"

namespace rva {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario files

inline topology topology_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "oriented-ring")
        return build_oriented_ring(j.at("n").get<int>(), j.value("special", 0));
    if (kind == "unoriented-ring")
        return build_unoriented_ring(j.at("n").get<int>(), j.value("special", 0));
    if (kind == "oriented-mesh")
        return build_oriented_mesh(j.at("rows").get<int>(), j.at("cols").get<int>());
    if (kind == "general") {
        auto adj = j.at("adjacency").get<std::vector<std::vector<node_id>>>();
        topology t = build_general(adj);
        t.special = j.value("special", -1);
        return t;
    }
    throw error(errc::parse_error, "unknown topology kind: " + kind);
}

inline json topology_to_json(const topology& t) {
    json j;
    j["kind"] = topo_kind_name(t.kind);
    switch (t.kind) {
        case topo_kind::oriented_ring:
        case topo_kind::unoriented_ring:
            j["n"] = t.node_count;
            j["special"] = t.special;
            break;
        case topo_kind::oriented_mesh:
            j["rows"] = t.rows;
            j["cols"] = t.cols;
            break;
        case topo_kind::general: {
            std::vector<std::vector<node_id>> adj(t.node_count);
            for (node_id v = 0; v < t.node_count; ++v)
                for (auto& [p, w] : t.adj[v]) adj[v].push_back(w);
            j["adjacency"] = adj;
            if (t.special >= 0) j["special"] = t.special;
            break;
        }
    }
    return j;
}

inline protocol_kind protocol_from_string(const std::string& s) {
    if (s == "rv-or") return protocol_kind::rv_or;
    if (s == "rv-ur") return protocol_kind::rv_ur;
    if (s == "rv-mesh") return protocol_kind::rv_mesh;
    throw error(errc::parse_error, "unknown protocol: " + s);
}

inline scenario scenario_from_json(const json& j) {
    scenario sc;
    sc.topo = topology_from_json(j.at("topology"));
    sc.proto = protocol_from_string(j.at("protocol").get<std::string>());
    sc.placements = j.at("agents").get<std::vector<node_id>>();
    if (j.contains("chirality"))
        for (auto& c : j.at("chirality"))
            sc.chir.push_back(c.get<std::string>() == "ccw" ? chirality::reverse : chirality::forward);
    if (j.contains("malicious") && !j.at("malicious").is_null())
        sc.malicious = j.at("malicious").get<int>();
    if (j.contains("policy")) {
        sc.policy.kind = j.at("policy").value("kind", "fair-random");
        sc.policy.seed = j.at("policy").value("seed", 0ull);
    }
    if (j.contains("limits")) {
        sc.limits.max_events = j.at("limits").value("max_events", sc.limits.max_events);
        sc.limits.max_traversals = j.at("limits").value("max_traversals", sc.limits.max_traversals);
    }
    sc.fair = j.value("fairness", "fair") != "adversary-controlled";
    sc.allow_stacked = j.value("allow_stacked", false);
    return sc;
}

inline scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw error(errc::parse_error, std::string("bad scenario: ") + e.what());
    }
}

inline json scenario_to_json(const scenario& sc) {
    json j;
    j["topology"] = topology_to_json(sc.topo);
    j["protocol"] = protocol_name(sc.proto);
    j["agents"] = sc.placements;
    if (!sc.chir.empty()) {
        std::vector<std::string> cs;
        for (auto c : sc.chir) cs.push_back(c == chirality::forward ? "cw" : "ccw");
        j["chirality"] = cs;
    }
    if (sc.malicious >= 0)
        j["malicious"] = sc.malicious;
    else
        j["malicious"] = nullptr;
    j["policy"] = {{"kind", sc.policy.kind}, {"seed", sc.policy.seed}};
    j["limits"] = {{"max_events", sc.limits.max_events}, {"max_traversals", sc.limits.max_traversals}};
    j["fairness"] = sc.fair ? "fair" : "adversary-controlled";
    if (sc.allow_stacked) j["allow_stacked"] = true;
    return j;
}

// ---------------------------------------------------------------------------
// Events, traces, verdicts, certificates

inline json event_to_json(const event& e) {
    switch (e.kind) {
        case ev_kind::activate: return {{"kind", "activate"}, {"agent", e.a}};
        case ev_kind::deliver: return {{"kind", "deliver"}, {"from", e.a}, {"to", e.b}};
        case ev_kind::swap_pair: return {{"kind", "swap"}, {"u", e.a}, {"v", e.b}};
        case ev_kind::relocate_malicious: return {{"kind", "relocate-malicious"}, {"target", e.a}};
    }
    return {};
}

inline event event_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "activate") return ev_activate(j.at("agent").get<int>());
    if (kind == "deliver") return ev_deliver(j.at("from").get<int>(), j.at("to").get<int>());
    if (kind == "swap") return ev_swap(j.at("u").get<int>(), j.at("v").get<int>());
    if (kind == "relocate-malicious") return ev_relocate(j.at("target").get<int>());
    throw error(errc::parse_error, "unknown event kind: " + kind);
}

inline json trace_record_to_json(const trace_record& r) {
    json j;
    j["clock"] = r.clock;
    j["event"] = event_to_json(r.ev);
    if (r.agent >= 0) j["agent"] = r.agent;
    j["bump"] = r.bump;
    if (!r.moves.empty()) {
        json ms = json::array();
        for (auto& m : r.moves) ms.push_back({{"agent", m.agent}, {"from", m.from}, {"to", m.to}});
        j["moves"] = ms;
    }
    if (!r.state_before.empty()) j["state_before"] = r.state_before;
    if (!r.state_after.empty()) j["state_after"] = r.state_after;
    j["snapshot"] = r.snapshot;
    return j;
}

inline void write_trace_jsonl(const std::string& path, const std::vector<trace_record>& trace) {
    std::ofstream out(path);
    if (!out) throw error(errc::parse_error, "cannot open trace file for writing: " + path);
    for (auto& r : trace) out << trace_record_to_json(r).dump() << "\n";
}

struct trace_file {
    std::vector<event> events;
    std::vector<uint64_t> snapshots;
};

inline trace_file read_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open trace file: " + path);
    trace_file tf;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        tf.events.push_back(event_from_json(j.at("event")));
        tf.snapshots.push_back(j.at("snapshot").get<uint64_t>());
    }
    return tf;
}

inline json verdict_to_json(const verdict& v) {
    json j;
    j["kind"] = verdict_name(v);
    if (auto* r = std::get_if<v_rendezvous>(&v)) {
        j["node"] = r->node;
        j["per_agent_traversals"] = r->per_agent_traversals;
        j["total_traversals"] = r->total_traversals;
    } else if (auto* l = std::get_if<v_livelock>(&v)) {
        json pre = json::array(), cyc = json::array();
        for (auto& e : l->prefix) pre.push_back(event_to_json(e));
        for (auto& e : l->cycle) cyc.push_back(event_to_json(e));
        j["prefix"] = pre;
        j["cycle"] = cyc;
        j["cycle_state_hashes"] = l->cycle_keys;
        j["states_explored"] = l->states_explored;
    } else if (auto* c = std::get_if<v_counterexample>(&v)) {
        json evs = json::array();
        for (auto& e : c->events) evs.push_back(event_to_json(e));
        j["events"] = evs;
        j["reason"] = c->reason;
        j["states_explored"] = c->states_explored;
    } else if (auto* a = std::get_if<v_all_rendezvous>(&v)) {
        j["states_explored"] = a->states_explored;
        j["max_total_traversals"] = a->max_total_traversals;
        j["max_per_agent_traversals"] = a->max_per_agent_traversals;
        j["traversal_divergence"] = a->traversal_divergence;
    } else if (auto* b = std::get_if<v_bound_exhausted>(&v)) {
        j["states_explored"] = b->states_explored;
    }
    return j;
}

inline json cut_certificate_to_json(const cut_certificate& c) {
    json j;
    j["cut_set"] = c.cut_set;
    j["components"] = c.components;
    if (!c.temporal_path.empty()) {
        json p = json::array();
        for (auto& h : c.temporal_path) p.push_back({{"step", h.step}, {"node", h.node}});
        j["temporal_path"] = p;
    }
    return j;
}

// Machine-readable move rule table: one entry per 12-bit occupancy pattern.
inline json mesh_rule_table_json() {
    json rules = json::array();
    for (uint32_t mask = 0; mask < (1u << two_hop_slot_count); ++mask) {
        std::array<bool, two_hop_slot_count> v{};
        for (int i = 0; i < two_hop_slot_count; ++i) v[i] = (mask >> i) & 1;
        auto d = classify_view(v);
        rules.push_back(d ? json(mesh_dir_name(*d)) : json("stay"));
    }
    json j;
    j["slot_order"] = json::array();
    for (int i = 0; i < two_hop_slot_count; ++i) j["slot_order"].push_back(two_hop_slot_name(i));
    j["actions_by_pattern"] = rules;
    return j;
}

}  // namespace rva
