#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rva/protocol.hpp"
#include "rva/topology.hpp"

namespace rva {

enum class protocol_kind : uint8_t { rv_or, rv_ur, rv_mesh };

inline const char* protocol_name(protocol_kind p) {
    switch (p) {
        case protocol_kind::rv_or: return "rv-or";
        case protocol_kind::rv_ur: return "rv-ur";
        case protocol_kind::rv_mesh: return "rv-mesh";
    }
    return "?";
}

enum class sim_mode : uint8_t { async_links, instantaneous };

enum class ev_kind : uint8_t { activate = 0, deliver = 1, swap_pair = 2, relocate_malicious = 3 };

struct event {
    ev_kind kind = ev_kind::activate;
    uint8_t a = 0, b = 0;  // activate: agent | deliver: from,to | swap: u,v | relocate: target

    uint32_t encode() const {
        return (static_cast<uint32_t>(kind) << 16) | (static_cast<uint32_t>(a) << 8) | b;
    }
    bool operator==(const event&) const = default;
    bool operator<(const event& o) const { return encode() < o.encode(); }
};

inline event ev_activate(int agent) { return {ev_kind::activate, static_cast<uint8_t>(agent), 0}; }
inline event ev_deliver(node_id u, node_id v) {
    return {ev_kind::deliver, static_cast<uint8_t>(u), static_cast<uint8_t>(v)};
}
inline event ev_swap(node_id u, node_id v) {
    if (u > v) std::swap(u, v);
    return {ev_kind::swap_pair, static_cast<uint8_t>(u), static_cast<uint8_t>(v)};
}
inline event ev_relocate(node_id target) {
    return {ev_kind::relocate_malicious, static_cast<uint8_t>(target), 0};
}

enum class loc_kind : uint8_t { at_node = 0, in_transit = 1 };

struct agent_rec {
    loc_kind loc = loc_kind::at_node;
    uint8_t node = 0;            // at_node: position; in_transit: source node
    uint8_t transit_to = 0;      // in_transit only
    chirality chi = chirality::forward;
    protocol_state ps;
    uint64_t traversals = 0;     // completed edge crossings; not part of state identity
};

// One FIFO queue entry: a leader and the followers glued to it.
struct transit_group {
    uint8_t from = 0, to = 0;
    std::vector<uint8_t> agents;  // leader first
};

struct move_effect {
    int agent;
    node_id from, to;
};

struct trace_record {
    uint64_t clock = 0;
    event ev;
    int agent = -1;  // activated agent, when applicable
    bool bump = false;
    std::vector<move_effect> moves;
    std::string state_before, state_after;  // activated agent's protocol state
    uint64_t snapshot = 0;                  // hash of the resulting state
};

struct sim_state {
    std::shared_ptr<const topology> topo_owner;  // keeps the topology alive across clones
    const topology* topo = nullptr;
    protocol_kind proto = protocol_kind::rv_or;
    sim_mode mode = sim_mode::async_links;
    std::vector<agent_rec> agents;
    int malicious = -1;  // node, or -1 when absent
    std::vector<transit_group> queues;
    uint64_t clock = 0;
    uint64_t total_traversals = 0;

    int agent_count() const { return static_cast<int>(agents.size()); }
};

// ---------------------------------------------------------------------------
// Hashing and canonical identity

namespace detail {

inline uint64_t fnv1a(const uint8_t* data, size_t len, uint64_t h = 1469598103934665603ull) {
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

struct agent_sort_key {
    uint8_t chi;
    uint16_t ps;
    uint8_t loc, a, b, grp, slot;
    int idx;
    bool operator<(const agent_sort_key& o) const {
        return std::tie(chi, ps, loc, a, b, grp, slot) < std::tie(o.chi, o.ps, o.loc, o.a, o.b, o.grp, o.slot);
    }
};

inline std::vector<agent_sort_key> agent_keys(const sim_state& s) {
    int k = s.agent_count();
    std::vector<agent_sort_key> keys(k);
    std::vector<uint8_t> grp(k, 255), slot(k, 255);
    for (size_t g = 0; g < s.queues.size(); ++g)
        for (size_t i = 0; i < s.queues[g].agents.size(); ++i) {
            grp[s.queues[g].agents[i]] = static_cast<uint8_t>(g);
            slot[s.queues[g].agents[i]] = static_cast<uint8_t>(i);
        }
    for (int i = 0; i < k; ++i) {
        const agent_rec& a = s.agents[i];
        keys[i] = {static_cast<uint8_t>(a.chi), encode_state(a.ps), static_cast<uint8_t>(a.loc),
                   a.node, a.transit_to, grp[i], slot[i], i};
    }
    return keys;
}

}  // namespace detail

// Identity of a state with agent names canonicalized away (agents are
// anonymous: identical (position, state) agents are interchangeable).
// Traversal counts and the clock are deliberately excluded.
inline std::vector<uint8_t> canonical_key(const sim_state& s) {
    auto keys = detail::agent_keys(s);
    std::sort(keys.begin(), keys.end());
    int k = s.agent_count();
    std::vector<uint8_t> rank(k);
    for (int r = 0; r < k; ++r) rank[keys[r].idx] = static_cast<uint8_t>(r);

    std::vector<uint8_t> out;
    out.reserve(8 + 5 * k + 4 * s.queues.size());
    out.push_back(static_cast<uint8_t>(s.mode));
    out.push_back(static_cast<uint8_t>(s.malicious + 1));
    out.push_back(static_cast<uint8_t>(k));
    for (auto& key : keys) {
        out.push_back(key.chi);
        out.push_back(static_cast<uint8_t>(key.ps & 0xff));
        out.push_back(static_cast<uint8_t>(key.ps >> 8));
        out.push_back(key.loc);
        out.push_back(key.a);
        out.push_back(key.b);
    }
    for (auto& g : s.queues) {
        out.push_back(g.from);
        out.push_back(g.to);
        out.push_back(static_cast<uint8_t>(g.agents.size()));
        for (uint8_t a : g.agents) out.push_back(rank[a]);
    }
    return out;
}

// The canonical agent order (rank per agent id) used by canonical_key.
inline std::vector<uint8_t> canonical_ranks(const sim_state& s) {
    auto keys = detail::agent_keys(s);
    std::sort(keys.begin(), keys.end());
    std::vector<uint8_t> rank(s.agent_count());
    for (size_t r = 0; r < keys.size(); ++r) rank[keys[r].idx] = static_cast<uint8_t>(r);
    return rank;
}

// Full-state hash for trace records; replaying a trace reproduces it exactly.
inline uint64_t snapshot_hash(const sim_state& s) {
    std::vector<uint8_t> b;
    b.push_back(static_cast<uint8_t>(s.mode));
    b.push_back(static_cast<uint8_t>(s.malicious + 1));
    for (auto& a : s.agents) {
        b.push_back(static_cast<uint8_t>(a.chi));
        b.push_back(static_cast<uint8_t>(encode_state(a.ps) & 0xff));
        b.push_back(static_cast<uint8_t>(encode_state(a.ps) >> 8));
        b.push_back(static_cast<uint8_t>(a.loc));
        b.push_back(a.node);
        b.push_back(a.transit_to);
        for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(a.traversals >> (8 * i)));
    }
    for (auto& g : s.queues) {
        b.push_back(g.from);
        b.push_back(g.to);
        for (uint8_t a : g.agents) b.push_back(a);
        b.push_back(255);
    }
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(s.clock >> (8 * i)));
    return detail::fnv1a(b.data(), b.size());
}

// ---------------------------------------------------------------------------
// Observations

namespace detail {

inline std::vector<protocol_state> colocated_states(const sim_state& s, int self) {
    std::vector<protocol_state> out;
    node_id at = s.agents[self].node;
    for (int i = 0; i < s.agent_count(); ++i) {
        if (i == self) continue;
        if (s.agents[i].loc == loc_kind::at_node && s.agents[i].node == at)
            out.push_back(s.agents[i].ps);
    }
    return out;
}

}  // namespace detail

inline ring_obs make_ring_obs(const sim_state& s, int agent, bool bumped) {
    const agent_rec& a = s.agents[agent];
    ring_obs o;
    o.at_special = (s.topo->special == a.node);
    o.last_attempt_bumped = bumped;
    o.colocated = detail::colocated_states(s, agent);
    o.degree = s.topo->degree(a.node);
    return o;
}

inline mesh_obs make_mesh_obs(const sim_state& s, int agent) {
    const agent_rec& a = s.agents[agent];
    mesh_obs o;
    auto cells = two_hop_cells(*s.topo, a.node);
    std::vector<char> occ(s.topo->node_count, 0);
    for (auto& ag : s.agents)
        if (ag.loc == loc_kind::at_node) occ[ag.node] = 1;
    for (int i = 0; i < two_hop_slot_count; ++i)
        o.occupancy[i] = cells[i].exists && occ[cells[i].node];
    o.colocated = detail::colocated_states(s, agent);
    return o;
}

// ---------------------------------------------------------------------------
// Protocol dispatch

inline std::pair<protocol_state, agent_action> dispatch_transition(const sim_state& s, int agent, bool bumped) {
    const agent_rec& a = s.agents[agent];
    switch (s.proto) {
        case protocol_kind::rv_or: {
            auto [ns, act] = rvor_transition(std::get<rvor_state>(a.ps), make_ring_obs(s, agent, bumped));
            return {protocol_state{ns}, act};
        }
        case protocol_kind::rv_ur: {
            auto [ns, act] = rvur_transition(std::get<rvur_state>(a.ps), make_ring_obs(s, agent, bumped));
            return {protocol_state{ns}, act};
        }
        case protocol_kind::rv_mesh: {
            auto [ns, act] = rvmesh_transition(std::get<rvmesh_state>(a.ps), make_mesh_obs(s, agent));
            return {protocol_state{ns}, act};
        }
    }
    throw error(errc::engine_fault, "bad protocol");
}

// Resolve a commanded move to a target node.
inline node_id resolve_move_target(const sim_state& s, int agent, const agent_action& act) {
    const agent_rec& a = s.agents[agent];
    if (auto* m = std::get_if<act_move_ring>(&act)) {
        int step = chirality_step(a.chi);
        if (m->dir == ring_dir::my_ccw) step = -step;
        return s.topo->ring_step(a.node, step);
    }
    if (auto* m = std::get_if<act_move_mesh>(&act)) {
        auto t = s.topo->mesh_neighbor(a.node, m->dir);
        if (!t) throw error(errc::protocol_fault, "move through nonexistent port");
        return *t;
    }
    throw error(errc::engine_fault, "not a move");
}

// True when the agent may not take part in a simultaneous swap in direction d.
inline bool swap_vetoed(const sim_state& s, int agent, mesh_dir d) {
    return rvmesh_swap_vetoed(std::get<rvmesh_state>(s.agents[agent].ps), d);
}

// Agents that no longer activate.
inline bool agent_terminated(const sim_state& s, int agent) {
    if (s.proto == protocol_kind::rv_or)
        return std::get<rvor_state>(s.agents[agent].ps).stopped;
    return false;
}

inline bool agents_gathered(const sim_state& s) {
    node_id at = -1;
    for (auto& a : s.agents) {
        if (a.loc != loc_kind::at_node) return false;
        if (at < 0) at = a.node;
        if (a.node != at) return false;
    }
    switch (s.proto) {
        case protocol_kind::rv_or:
            for (auto& a : s.agents)
                if (!std::get<rvor_state>(a.ps).stopped) return false;
            return true;
        case protocol_kind::rv_ur:
            for (auto& a : s.agents)
                if (std::get<rvur_state>(a.ps).phase != rvur_phase::terminator) return false;
            return true;
        case protocol_kind::rv_mesh:
            return true;  // single occupied node
    }
    return false;
}

inline int occupied_node_count(const sim_state& s) {
    std::vector<char> occ(s.topo->node_count, 0);
    int n = 0;
    for (auto& a : s.agents)
        if (a.loc == loc_kind::at_node && !occ[a.node]) {
            occ[a.node] = 1;
            ++n;
        }
    return n;
}

// ---------------------------------------------------------------------------
// Malicious-agent mobility

namespace detail {

// A node the blocker may stand on: free of at-node agents and not the target
// of any in-transit agent.
inline bool free_for_malicious(const sim_state& s, node_id v) {
    for (auto& a : s.agents) {
        if (a.loc == loc_kind::at_node && a.node == v) return false;
        if (a.loc == loc_kind::in_transit && a.transit_to == v) return false;
    }
    return true;
}

inline bool edge_clear_for_malicious(const sim_state& s, node_id u, node_id v) {
    for (auto& g : s.queues)
        if ((g.from == u && g.to == v) || (g.from == v && g.to == u)) return false;
    return true;
}

}  // namespace detail

// All nodes the blocker can relocate to in one event (multi-hop through its
// free region; never crossing agents, in-transit targets, or busy links).
inline std::vector<node_id> malicious_region(const sim_state& s) {
    std::vector<node_id> out;
    if (s.malicious < 0) return out;
    std::vector<char> seen(s.topo->node_count, 0);
    std::vector<node_id> stack{s.malicious};
    seen[s.malicious] = 1;
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        for (auto& [p, w] : s.topo->adj[u]) {
            if (seen[w]) continue;
            if (!detail::free_for_malicious(s, w)) continue;
            if (!detail::edge_clear_for_malicious(s, u, w)) continue;
            seen[w] = 1;
            out.push_back(w);
            stack.push_back(w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Shortest legal path for the blocker from its position to target.
inline std::vector<node_id> malicious_path(const sim_state& s, node_id target) {
    std::vector<int> par(s.topo->node_count, -2);
    std::vector<node_id> q{s.malicious};
    par[s.malicious] = -1;
    for (size_t h = 0; h < q.size(); ++h) {
        node_id u = q[h];
        if (u == target) break;
        for (auto& [p, w] : s.topo->adj[u]) {
            if (par[w] != -2) continue;
            if (!detail::free_for_malicious(s, w)) continue;
            if (!detail::edge_clear_for_malicious(s, u, w)) continue;
            par[w] = u;
            q.push_back(w);
        }
    }
    if (par[target] == -2) throw error(errc::illegal_event, "malicious target unreachable");
    std::vector<node_id> path;
    for (node_id v = target; v != -1; v = par[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

// ---------------------------------------------------------------------------
// Enabled events

inline std::vector<event> enabled_events(const sim_state& s) {
    std::vector<event> out;
    for (int i = 0; i < s.agent_count(); ++i)
        if (s.agents[i].loc == loc_kind::at_node && !agent_terminated(s, i))
            out.push_back(ev_activate(i));
    {
        // One deliver per nonempty directed edge (front group moves).
        std::vector<std::pair<uint8_t, uint8_t>> seen;
        for (auto& g : s.queues) {
            auto e = std::make_pair(g.from, g.to);
            if (std::find(seen.begin(), seen.end(), e) == seen.end()) {
                seen.push_back(e);
                out.push_back(ev_deliver(g.from, g.to));
            }
        }
    }
    if (s.mode == sim_mode::instantaneous) {
        // Simultaneous swaps: all agents on both endpoints command opposing
        // moves across the edge and none vetoes via its swap latch.
        std::vector<std::vector<int>> at(s.topo->node_count);
        for (int i = 0; i < s.agent_count(); ++i)
            if (s.agents[i].loc == loc_kind::at_node) at[s.agents[i].node].push_back(i);
        std::vector<std::optional<mesh_dir>> cmd(s.topo->node_count);
        for (node_id v = 0; v < s.topo->node_count; ++v)
            if (!at[v].empty()) cmd[v] = classify_view(make_mesh_obs(s, at[v][0]).occupancy);
        for (node_id u = 0; u < s.topo->node_count; ++u) {
            if (at[u].empty() || !cmd[u]) continue;
            auto t = s.topo->mesh_neighbor(u, *cmd[u]);
            if (!t || *t <= u) continue;
            node_id v = *t;
            if (at[v].empty() || !cmd[v]) continue;
            if (*cmd[v] != inverse(*cmd[u])) continue;
            bool veto = false;
            for (int i : at[u])
                if (swap_vetoed(s, i, *cmd[u])) veto = true;
            for (int i : at[v])
                if (swap_vetoed(s, i, *cmd[v])) veto = true;
            if (!veto) out.push_back(ev_swap(u, v));
        }
    }
    if (s.malicious >= 0)
        for (node_id t : malicious_region(s)) out.push_back(ev_relocate(t));
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Step

namespace detail {

inline std::vector<int> colocated_followers(const sim_state& s, int leader) {
    std::vector<int> out;
    node_id at = s.agents[leader].node;
    for (int i = 0; i < s.agent_count(); ++i) {
        if (i == leader || s.agents[i].loc != loc_kind::at_node || s.agents[i].node != at) continue;
        if (auto* u = std::get_if<rvur_state>(&s.agents[i].ps); u && u->phase == rvur_phase::following)
            out.push_back(i);
    }
    return out;
}

inline void apply_activate(sim_state& s, int agent, trace_record& rec) {
    rec.agent = agent;
    rec.state_before = state_string(s.agents[agent].ps);

    auto [ns, act] = dispatch_transition(s, agent, false);
    s.agents[agent].ps = ns;

    if (is_move(act)) {
        node_id from = s.agents[agent].node;
        node_id to = resolve_move_target(s, agent, act);
        if (to == s.malicious) {
            // Bump: the agent stays put; the transition sees the bump within
            // this same activation. A move the re-invocation may command is
            // deferred to the next activation.
            rec.bump = true;
            auto [ns2, act2] = dispatch_transition(s, agent, true);
            s.agents[agent].ps = ns2;
        } else if (s.mode == sim_mode::async_links) {
            transit_group g;
            g.from = static_cast<uint8_t>(from);
            g.to = static_cast<uint8_t>(to);
            g.agents.push_back(static_cast<uint8_t>(agent));
            bool hauling = false;
            if (auto* u = std::get_if<rvur_state>(&s.agents[agent].ps))
                hauling = u->phase == rvur_phase::collector_moving;
            if (hauling)
                for (int f : colocated_followers(s, agent)) g.agents.push_back(static_cast<uint8_t>(f));
            for (uint8_t a : g.agents) {
                s.agents[a].loc = loc_kind::in_transit;
                s.agents[a].node = static_cast<uint8_t>(from);
                s.agents[a].transit_to = static_cast<uint8_t>(to);
            }
            s.queues.push_back(std::move(g));
        } else {
            if (s.malicious == to)
                throw error(errc::protocol_fault, "mesh move into blocked node");
            s.agents[agent].node = static_cast<uint8_t>(to);
            s.agents[agent].traversals += 1;
            s.total_traversals += 1;
            rec.moves.push_back({agent, from, to});
        }
    }
    rec.state_after = state_string(s.agents[agent].ps);
}

inline void apply_deliver(sim_state& s, node_id from, node_id to, trace_record& rec) {
    auto it = std::find_if(s.queues.begin(), s.queues.end(), [&](const transit_group& g) {
        return g.from == from && g.to == to;
    });
    if (it == s.queues.end()) throw error(errc::illegal_event, "deliver on empty link");
    transit_group g = *it;
    s.queues.erase(it);
    for (uint8_t a : g.agents) {
        s.agents[a].loc = loc_kind::at_node;
        s.agents[a].node = static_cast<uint8_t>(to);
        s.agents[a].transit_to = 0;
        s.agents[a].traversals += 1;
        s.total_traversals += 1;
        if (auto* u = std::get_if<rvur_state>(&s.agents[a].ps))
            u->fresh_searcher = false;  // the searcher has completed a hop
        rec.moves.push_back({a, from, to});
    }
}

inline void apply_swap(sim_state& s, node_id u, node_id v, trace_record& rec) {
    mesh_dir du = mesh_dir::north;
    bool found = false;
    for (mesh_dir d : {mesh_dir::north, mesh_dir::south, mesh_dir::east, mesh_dir::west}) {
        auto t = s.topo->mesh_neighbor(u, d);
        if (t && *t == v) {
            du = d;
            found = true;
        }
    }
    if (!found) throw error(errc::illegal_event, "swap endpoints not adjacent");
    mesh_dir dv = inverse(du);
    for (int i = 0; i < s.agent_count(); ++i) {
        agent_rec& a = s.agents[i];
        if (a.loc != loc_kind::at_node) continue;
        if (a.node == u) {
            a.node = static_cast<uint8_t>(v);
            a.ps = rvmesh_state{du};
            a.traversals += 1;
            s.total_traversals += 1;
            rec.moves.push_back({i, u, v});
        } else if (a.node == v) {
            a.node = static_cast<uint8_t>(u);
            a.ps = rvmesh_state{dv};
            a.traversals += 1;
            s.total_traversals += 1;
            rec.moves.push_back({i, v, u});
        }
    }
}

}  // namespace detail

// Applies one event in place. The caller is responsible for only applying
// enabled events; illegal ones throw.
inline trace_record apply_event(sim_state& s, const event& e) {
    trace_record rec;
    rec.ev = e;
    switch (e.kind) {
        case ev_kind::activate: {
            if (e.a >= s.agents.size() || s.agents[e.a].loc != loc_kind::at_node ||
                agent_terminated(s, e.a))
                throw error(errc::illegal_event, "activate not enabled");
            detail::apply_activate(s, e.a, rec);
            break;
        }
        case ev_kind::deliver:
            detail::apply_deliver(s, e.a, e.b, rec);
            break;
        case ev_kind::swap_pair:
            detail::apply_swap(s, e.a, e.b, rec);
            break;
        case ev_kind::relocate_malicious: {
            auto path = malicious_path(s, e.a);  // validates legality
            (void)path;
            s.malicious = e.a;
            break;
        }
    }
    s.clock += 1;
    rec.clock = s.clock;
    rec.snapshot = snapshot_hash(s);
    return rec;
}

inline std::pair<sim_state, trace_record> step(const sim_state& s, const event& e) {
    sim_state n = s;
    trace_record rec = apply_event(n, e);
    return {std::move(n), rec};
}

// Replays a trace's event sequence from an initial state and checks each
// recorded snapshot hash. Returns false on the first mismatch.
inline bool replay_trace(sim_state s, const std::vector<trace_record>& trace) {
    for (auto& r : trace) {
        trace_record got = apply_event(s, r.ev);
        if (got.snapshot != r.snapshot) return false;
    }
    return true;
}

}  // namespace rva
