#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rva/analysis.hpp"
#include "rva/run.hpp"

namespace rva {

struct policy_spec {
    std::string kind = "fair-random";  // fair-random | greedy-blocker | symmetric-ring
    uint64_t seed = 0;
};

struct scenario {
    topology topo;
    protocol_kind proto = protocol_kind::rv_or;
    std::vector<node_id> placements;
    std::vector<chirality> chir;  // per agent; unoriented rings
    int malicious = -1;           // -1: absent (only valid when no node is free)
    policy_spec policy;
    run_limits limits;
    bool fair = true;             // fairness contract for model checking
    bool allow_stacked = false;   // mesh mid-run configurations
};

inline sim_state init_state(const scenario& sc) {
    const topology& t = sc.topo;
    int k = static_cast<int>(sc.placements.size());
    if (k < 2) throw error(errc::invalid_scenario, "need at least two agents");
    switch (sc.proto) {
        case protocol_kind::rv_or:
            if (t.kind != topo_kind::oriented_ring)
                throw error(errc::invalid_scenario, "rv-or needs an oriented ring");
            break;
        case protocol_kind::rv_ur:
            if (t.kind != topo_kind::unoriented_ring)
                throw error(errc::invalid_scenario, "rv-ur needs an unoriented ring");
            break;
        case protocol_kind::rv_mesh:
            if (t.kind != topo_kind::oriented_mesh)
                throw error(errc::invalid_scenario, "rv-mesh needs an oriented mesh");
            break;
    }
    std::vector<char> occ(t.node_count, 0);
    for (node_id v : sc.placements) {
        if (v < 0 || v >= t.node_count) throw error(errc::invalid_scenario, "placement out of range");
        if (occ[v] && !(sc.allow_stacked && sc.proto == protocol_kind::rv_mesh))
            throw error(errc::invalid_scenario, "at most one agent at a node");
        occ[v] = 1;
    }
    if (sc.malicious >= 0) {
        if (sc.malicious >= t.node_count) throw error(errc::invalid_scenario, "malicious start out of range");
        if (occ[sc.malicious]) throw error(errc::invalid_scenario, "malicious start on an occupied node");
    } else {
        for (node_id v = 0; v < t.node_count; ++v)
            if (!occ[v]) throw error(errc::invalid_scenario, "malicious agent required when free nodes exist");
    }
    if (!sc.chir.empty() && static_cast<int>(sc.chir.size()) != k)
        throw error(errc::invalid_scenario, "chirality list must match agent count");

    sim_state s;
    s.topo_owner = std::make_shared<topology>(sc.topo);
    s.topo = s.topo_owner.get();
    s.proto = sc.proto;
    s.mode = sc.proto == protocol_kind::rv_mesh ? sim_mode::instantaneous : sim_mode::async_links;
    s.malicious = sc.malicious;
    s.agents.resize(k);
    for (int i = 0; i < k; ++i) {
        agent_rec& a = s.agents[i];
        a.loc = loc_kind::at_node;
        a.node = static_cast<uint8_t>(sc.placements[i]);
        a.chi = sc.chir.empty() ? chirality::forward : sc.chir[i];
        switch (sc.proto) {
            case protocol_kind::rv_or: a.ps = rvor_state{}; break;
            case protocol_kind::rv_ur: a.ps = rvur_state{}; break;
            case protocol_kind::rv_mesh: a.ps = rvmesh_state{}; break;
        }
    }
    return s;
}

inline std::unique_ptr<scheduler_policy> make_policy(const scenario& sc, const sim_state& s0) {
    if (sc.policy.kind == "fair-random") return std::make_unique<fair_random_policy>(sc.policy.seed);
    if (sc.policy.kind == "greedy-blocker") return std::make_unique<greedy_blocker_policy>();
    if (sc.policy.kind == "symmetric-ring") return std::make_unique<symmetric_ring_policy>(s0);
    throw error(errc::invalid_scenario, "unknown policy: " + sc.policy.kind);
}

// ---------------------------------------------------------------------------
// Canned demonstrations: scripted configuration histories whose last step is
// flagged separating by the analysis predicates, plus the even-ring livelock.

struct analysis_demo {
    std::string name;
    topology topo;
    std::vector<std::vector<node_id>> occupied_steps;  // C_0 .. C_t
};

// Three agents in a corner shape; the corner agent's move disconnects the rest.
inline analysis_demo demo_gamma() {
    analysis_demo d;
    d.name = "gamma";
    d.topo = build_oriented_mesh(4, 4);
    auto at = [&](int r, int c) { return d.topo.at(r, c); };
    d.occupied_steps.push_back({at(0, 1), at(1, 1), at(1, 0)});
    d.occupied_steps.push_back({at(0, 1), at(1, 2), at(1, 0)});  // (1,1) moved East
    return d;
}

// A ring of agents around one enclosed free cell; two mirrored wall agents
// step onto occupied neighbors, opening a free channel from the hole to the
// border that splits the remaining walls.
inline analysis_demo demo_hole() {
    analysis_demo d;
    d.name = "hole";
    d.topo = build_oriented_mesh(5, 5);
    auto at = [&](int r, int c) { return d.topo.at(r, c); };
    std::vector<node_id> ring = {at(1, 1), at(1, 2), at(1, 3), at(2, 1),
                                 at(2, 3), at(3, 1), at(3, 2), at(3, 3)};
    d.occupied_steps.push_back(ring);
    std::vector<node_id> s1 = {at(1, 1), at(1, 3), at(2, 1),
                               at(2, 3), at(3, 1), at(3, 2), at(3, 3)};  // (1,2) -> (1,1)
    d.occupied_steps.push_back(s1);
    std::vector<node_id> s2 = {at(1, 1), at(1, 3), at(2, 1),
                               at(2, 3), at(3, 1), at(3, 3)};  // (3,2) -> (3,3)
    d.occupied_steps.push_back(s2);
    return d;
}

// A disconnected, initially non-separable placement where any move connects
// the free separator.
inline analysis_demo demo_disconnected() {
    analysis_demo d;
    d.name = "disconnected";
    d.topo = build_oriented_mesh(2, 3);
    auto at = [&](int r, int c) { return d.topo.at(r, c); };
    d.occupied_steps.push_back({at(0, 0), at(1, 1), at(0, 2)});
    d.occupied_steps.push_back({at(0, 0), at(1, 2), at(0, 2)});  // (1,1) moved East
    return d;
}

// Connected occupied set whose two-node cut must not be vacated while both
// sides still hold agents: vacating x1 then x2 becomes separating.
inline analysis_demo demo_two_cut() {
    analysis_demo d;
    d.name = "two-cut";
    // nodes: p=0 q=1 x1=2 x2=3 a=4 b=5 c=6
    std::vector<std::vector<node_id>> adj = {
        {2, 3, 4},     // p: x1 x2 a
        {2, 3},        // q: x1 x2
        {0, 1, 3, 4, 5},  // x1: p q x2 a b
        {0, 1, 2, 6},  // x2: p q x1 c
        {0, 2, 5},     // a: p x1 b
        {2, 4, 6},     // b: x1 a c
        {3, 5},        // c: x2 b
    };
    d.topo = build_general(adj);
    d.occupied_steps.push_back({0, 1, 2, 3});
    d.occupied_steps.push_back({0, 1, 4, 3});  // x1's agent -> a
    d.occupied_steps.push_back({0, 1, 4, 6});  // x2's agent -> c
    return d;
}

// Even number of agents on an unoriented ring, two mirrored half-chains.
inline scenario demo_even_ring(int n, int k) {
    if (k < 2 || k % 2 != 0 || n <= k + 1)
        throw error(errc::invalid_scenario, "even-ring demo needs even k and n > k+1");
    scenario sc;
    sc.topo = build_unoriented_ring(n, 0);  // special node in the free arc
    sc.proto = protocol_kind::rv_ur;
    for (int i = 0; i < k; ++i) sc.placements.push_back(1 + i);
    for (int i = 0; i < k; ++i)
        sc.chir.push_back(i < k / 2 ? chirality::reverse : chirality::forward);
    sc.malicious = (1 + k + (n - k - 1) / 2) % n;  // middle of the free arc
    sc.policy.kind = "symmetric-ring";
    sc.fair = false;  // the adversary controls scheduling here
    return sc;
}

inline config_history demo_history(const analysis_demo& d) {
    config_history h;
    for (auto& occ : d.occupied_steps) h.configs.emplace_back(d.topo, occ);
    return h;
}

}  // namespace rva
