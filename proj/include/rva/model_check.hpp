#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <unordered_map>

#include "rva/run.hpp"

namespace rva {

struct mc_options {
    uint64_t max_states = 2000000;
    uint32_t max_depth = 0xffffffffu;
    bool fair = true;            // prune cycles that starve a perpetually enabled event
    bool compute_bounds = true;  // longest-path traversal maxima
    uint64_t permutation_seed = 0;  // nonzero: shuffle expansion order (graph unchanged)
};

struct mc_hooks {
    // Return a nonempty description to flag a per-edge property violation.
    std::function<std::string(const sim_state& before, const event& e, const trace_record& rec,
                              const sim_state& after)>
        on_edge;
};

struct mc_result {
    verdict v;
    uint64_t states = 0;
    uint64_t edges = 0;
    uint64_t violations = 0;
};

namespace detail {

struct mc_edge {
    event ev;
    uint32_t to;
    uint8_t weight;                 // total traversals added
    std::vector<uint8_t> slot_map;  // from-slot -> to-slot (bounds only)
    std::vector<uint8_t> slot_inc;  // per from-slot traversal increment (bounds only)
};

struct mc_node {
    uint32_t parent = 0xffffffffu;
    event parent_ev;
    uint32_t depth = 0;
    bool gathered = false;
    std::vector<uint32_t> enabled;  // event codes, sorted
    std::vector<mc_edge> out;
};

inline std::vector<event> path_events(const std::vector<mc_node>& nodes, uint32_t idx) {
    std::vector<event> out;
    while (nodes[idx].parent != 0xffffffffu) {
        out.push_back(nodes[idx].parent_ev);
        idx = nodes[idx].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// Tarjan SCC, iterative. Returns component id per node; ids are emitted
// sinks-first (reverse topological order of the condensation).
inline std::vector<int> tarjan_scc(const std::vector<mc_node>& nodes, int& scc_count) {
    int n = static_cast<int>(nodes.size());
    std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stk;
    std::vector<char> on_stk(n, 0);
    int counter = 0;
    scc_count = 0;
    struct frame {
        int v;
        size_t ei;
    };
    for (int root = 0; root < n; ++root) {
        if (num[root] >= 0) continue;
        std::vector<frame> call{{root, 0}};
        num[root] = low[root] = counter++;
        stk.push_back(root);
        on_stk[root] = 1;
        while (!call.empty()) {
            frame& f = call.back();
            if (f.ei < nodes[f.v].out.size()) {
                int w = static_cast<int>(nodes[f.v].out[f.ei].to);
                ++f.ei;
                if (num[w] < 0) {
                    num[w] = low[w] = counter++;
                    stk.push_back(w);
                    on_stk[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stk[w]) {
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
                if (low[v] == num[v]) {
                    while (true) {
                        int w = stk.back();
                        stk.pop_back();
                        on_stk[w] = 0;
                        comp[w] = scc_count;
                        if (w == v) break;
                    }
                    ++scc_count;
                }
            }
        }
    }
    return comp;
}

}  // namespace detail

// Exhaustive bounded search over the transition system induced by
// enabled_events/step, with canonical visited-state hashing.
inline mc_result model_check(const sim_state& s0, const mc_options& opt, const mc_hooks* hooks = nullptr) {
    using detail::mc_edge;
    using detail::mc_node;

    mc_result res;
    std::vector<mc_node> nodes;
    std::unordered_map<std::string, uint32_t> visited;
    std::deque<std::pair<sim_state, uint32_t>> frontier;
    std::mt19937_64 perm_rng(opt.permutation_seed);

    uint64_t first_violation_node = UINT64_MAX;
    event first_violation_ev{};
    std::string first_violation_reason;

    {
        auto key = canonical_key(s0);
        visited.emplace(std::string(key.begin(), key.end()), 0);
        nodes.emplace_back();
        nodes[0].gathered = agents_gathered(s0);
        if (!nodes[0].gathered) frontier.emplace_back(s0, 0);
    }

    bool truncated = false;
    while (!frontier.empty()) {
        auto [s, idx] = std::move(frontier.front());
        frontier.pop_front();
        if (nodes[idx].depth >= opt.max_depth) {
            truncated = true;
            continue;
        }
        auto enabled = enabled_events(s);
        nodes[idx].enabled.reserve(enabled.size());
        for (auto& e : enabled) nodes[idx].enabled.push_back(e.encode());
        if (opt.permutation_seed) std::shuffle(enabled.begin(), enabled.end(), perm_rng);

        auto ranks_from = canonical_ranks(s);
        for (auto& e : enabled) {
            sim_state t = s;
            trace_record rec;
            try {
                rec = apply_event(t, e);
            } catch (const error& err) {
                ++res.violations;
                if (first_violation_node == UINT64_MAX) {
                    first_violation_node = idx;
                    first_violation_ev = e;
                    first_violation_reason = err.what();
                }
                continue;
            }
            if (hooks && hooks->on_edge) {
                std::string why = hooks->on_edge(s, e, rec, t);
                if (!why.empty()) {
                    ++res.violations;
                    if (first_violation_node == UINT64_MAX) {
                        first_violation_node = idx;
                        first_violation_ev = e;
                        first_violation_reason = why;
                    }
                }
            }
            auto key = canonical_key(t);
            std::string ks(key.begin(), key.end());
            auto [it, fresh] = visited.emplace(ks, static_cast<uint32_t>(nodes.size()));
            uint32_t to = it->second;
            mc_edge edge;
            edge.ev = e;
            edge.to = to;
            edge.weight = static_cast<uint8_t>(t.total_traversals - s.total_traversals);
            if (opt.compute_bounds) {
                auto ranks_to = canonical_ranks(t);
                int k = s.agent_count();
                edge.slot_map.resize(k);
                edge.slot_inc.resize(k);
                for (int a = 0; a < k; ++a) {
                    edge.slot_map[ranks_from[a]] = ranks_to[a];
                    edge.slot_inc[ranks_from[a]] =
                        static_cast<uint8_t>(t.agents[a].traversals - s.agents[a].traversals);
                }
            }
            if (fresh) {
                nodes.emplace_back();
                nodes[to].parent = idx;
                nodes[to].parent_ev = e;
                nodes[to].depth = nodes[idx].depth + 1;
                nodes[to].gathered = agents_gathered(t);
                if (!nodes[to].gathered) frontier.emplace_back(std::move(t), to);
            }
            ++res.edges;
            nodes[idx].out.push_back(std::move(edge));
            if (nodes.size() >= opt.max_states) {
                res.states = nodes.size();
                res.v = v_bound_exhausted{nodes.size()};
                return res;
            }
        }
    }
    res.states = nodes.size();
    if (truncated) {
        res.v = v_bound_exhausted{nodes.size()};
        return res;
    }

    // Violations dominate: report the first one with its access path.
    if (res.violations > 0) {
        v_counterexample ce;
        ce.events = detail::path_events(nodes, static_cast<uint32_t>(first_violation_node));
        ce.events.push_back(first_violation_ev);
        ce.reason = first_violation_reason;
        ce.states_explored = nodes.size();
        res.v = ce;
        return res;
    }

    // Dead ends: a maximal finite execution that never gathered.
    for (uint32_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].gathered && nodes[i].enabled.empty() && nodes[i].out.empty()) {
            if (nodes[i].parent == 0xffffffffu && agents_gathered(s0)) continue;
            v_counterexample ce;
            ce.events = detail::path_events(nodes, i);
            ce.reason = "dead end: no enabled events and not gathered";
            ce.states_explored = nodes.size();
            res.v = ce;
            return res;
        }
    }

    // Cycle analysis over the reachable graph.
    int scc_count = 0;
    auto comp = detail::tarjan_scc(nodes, scc_count);
    std::vector<std::vector<uint32_t>> members(scc_count);
    for (uint32_t i = 0; i < nodes.size(); ++i) members[comp[i]].push_back(i);

    // Any reachable cycle that performs traversals lets fair executions pump
    // the traversal total without bound before proceeding.
    bool divergence = false;
    for (int c = 0; c < scc_count; ++c)
        for (uint32_t v : members[c])
            for (auto& e : nodes[v].out)
                if (comp[e.to] == c && e.weight > 0) divergence = true;

    // Livelock detection. The adversary schedules freely (and may park its
    // agent forever), but honest service is strongly fair: an agent's enabled
    // step, offered infinitely often, eventually completes. A fair
    // non-gathering execution therefore recurs inside a state set that is
    // closed under every honest edge; find such sets by iterated pruning.
    int livelock_scc = -1;
    std::vector<uint32_t> lasso_members;
    if (!opt.fair) {
        for (int c = 0; c < scc_count && livelock_scc < 0; ++c)
            for (uint32_t v : members[c])
                for (auto& e : nodes[v].out)
                    if (comp[e.to] == c) {
                        livelock_scc = c;
                        lasso_members = members[c];
                        break;
                    }
    } else {
        std::vector<char> alive(nodes.size(), 1);
        for (uint32_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].gathered) alive[i] = 0;
        std::vector<int> cur_comp = comp;
        bool changed = true;
        while (changed) {
            changed = false;
            // prune states whose honest edges escape their own live component
            for (uint32_t v = 0; v < nodes.size(); ++v) {
                if (!alive[v]) continue;
                for (auto& e : nodes[v].out) {
                    if (e.ev.kind == ev_kind::relocate_malicious) continue;
                    if (!alive[e.to] || cur_comp[e.to] != cur_comp[v]) {
                        alive[v] = 0;
                        changed = true;
                        break;
                    }
                }
            }
            if (!changed) break;
            // recompute components on the surviving subgraph
            std::vector<detail::mc_node> sub(nodes.size());
            for (uint32_t v = 0; v < nodes.size(); ++v) {
                if (!alive[v]) continue;
                for (auto& e : nodes[v].out)
                    if (alive[e.to]) sub[v].out.push_back({e.ev, e.to, 0, {}, {}});
            }
            int sub_count = 0;
            cur_comp = detail::tarjan_scc(sub, sub_count);
        }
        // any surviving component with an internal edge is a fair livelock
        std::map<int, std::vector<uint32_t>> live_members;
        for (uint32_t v = 0; v < nodes.size(); ++v)
            if (alive[v]) live_members[cur_comp[v]].push_back(v);
        for (auto& [c, mem] : live_members) {
            bool internal = false;
            for (uint32_t v : mem)
                for (auto& e : nodes[v].out)
                    if (alive[e.to] && cur_comp[e.to] == c) internal = true;
            if (internal) {
                livelock_scc = c;
                lasso_members = mem;
                break;
            }
        }
    }

    if (livelock_scc >= 0) {
        // Lasso: path to the component, then a closed walk covering every
        // internal edge (hence taking every honest step the states offer).
        std::vector<char> member_set(nodes.size(), 0);
        for (uint32_t v : lasso_members) member_set[v] = 1;
        auto in_component = [&](uint32_t v) { return member_set[v] != 0; };
        uint32_t entry = *std::min_element(lasso_members.begin(), lasso_members.end());
        v_livelock lv;
        lv.prefix = detail::path_events(nodes, entry);
        lv.states_explored = nodes.size();

        struct pend {
            uint32_t from;
            size_t ei;
        };
        std::vector<pend> internal;
        for (uint32_t v : lasso_members)
            for (size_t i = 0; i < nodes[v].out.size(); ++i)
                if (in_component(nodes[v].out[i].to)) internal.push_back({v, i});
        std::vector<char> covered(internal.size(), 0);
        auto walk_to = [&](uint32_t from, uint32_t goal, std::vector<event>& acc) {
            if (from == goal) return;
            std::unordered_map<uint32_t, std::pair<uint32_t, event>> par;
            std::deque<uint32_t> q{from};
            par.emplace(from, std::make_pair(0xffffffffu, event{}));
            while (!q.empty()) {
                uint32_t u = q.front();
                q.pop_front();
                if (u == goal) break;
                for (auto& e : nodes[u].out) {
                    if (!in_component(e.to) || par.count(e.to)) continue;
                    par.emplace(e.to, std::make_pair(u, e.ev));
                    q.push_back(e.to);
                }
            }
            std::vector<event> seg;
            for (uint32_t v = goal; v != from; v = par[v].first) seg.push_back(par[v].second);
            std::reverse(seg.begin(), seg.end());
            for (auto& e : seg) acc.push_back(e);
        };
        uint32_t cur = entry;
        for (size_t i = 0; i < internal.size(); ++i) {
            if (covered[i]) continue;
            walk_to(cur, internal[i].from, lv.cycle);
            lv.cycle.push_back(nodes[internal[i].from].out[internal[i].ei].ev);
            cur = nodes[internal[i].from].out[internal[i].ei].to;
            covered[i] = 1;
        }
        walk_to(cur, entry, lv.cycle);
        // Stamp canonical hashes along the cycle by replay.
        sim_state s = s0;
        for (auto& e : lv.prefix) apply_event(s, e);
        auto key0 = canonical_key(s);
        lv.cycle_keys.push_back(detail::fnv1a(key0.data(), key0.size()));
        for (auto& e : lv.cycle) {
            apply_event(s, e);
            auto key = canonical_key(s);
            lv.cycle_keys.push_back(detail::fnv1a(key.data(), key.size()));
        }
        res.v = lv;
        return res;
    }

    // Every fair maximal execution gathers.
    v_all_rendezvous allr;
    allr.states_explored = nodes.size();
    allr.traversal_divergence = divergence;
    if (divergence) {
        allr.max_total_traversals = UINT64_MAX;
        allr.max_per_agent_traversals = UINT64_MAX;
        res.v = allr;
        return res;
    }

    if (opt.compute_bounds && !nodes.empty()) {
        int k = s0.agent_count();
        const uint64_t NEG = UINT64_MAX;  // unreachable marker
        std::vector<uint64_t> total(nodes.size(), NEG);
        std::vector<std::vector<uint64_t>> slots(nodes.size());
        total[0] = 0;
        slots[0].assign(k, 0);
        // Process components in forward topological order (Tarjan emits
        // sinks first, so walk component ids from high to low).
        std::vector<std::vector<uint32_t>> by_comp(scc_count);
        for (uint32_t i = 0; i < nodes.size(); ++i) by_comp[comp[i]].push_back(i);
        for (int c = scc_count - 1; c >= 0; --c) {
            // Fixpoint within the component (internal edges are zero-weight
            // but may permute slots), then push across outgoing edges.
            bool changed = true;
            while (changed) {
                changed = false;
                for (uint32_t v : by_comp[c]) {
                    if (total[v] == NEG) continue;
                    for (auto& e : nodes[v].out) {
                        if (comp[e.to] != c) continue;
                        uint64_t cand = total[v] + e.weight;
                        if (total[e.to] == NEG) {
                            slots[e.to].assign(k, 0);
                            total[e.to] = 0;
                        }
                        if (cand > total[e.to]) {
                            total[e.to] = cand;
                            changed = true;
                        }
                        for (int r = 0; r < k; ++r) {
                            uint64_t sv = slots[v][r] + e.slot_inc[r];
                            if (sv > slots[e.to][e.slot_map[r]]) {
                                slots[e.to][e.slot_map[r]] = sv;
                                changed = true;
                            }
                        }
                    }
                }
            }
            for (uint32_t v : by_comp[c]) {
                if (total[v] == NEG) continue;
                for (auto& e : nodes[v].out) {
                    if (comp[e.to] == c) continue;
                    uint64_t cand = total[v] + e.weight;
                    if (total[e.to] == NEG) {
                        slots[e.to].assign(k, 0);
                        total[e.to] = 0;
                    }
                    if (cand > total[e.to]) total[e.to] = cand;
                    for (int r = 0; r < k; ++r) {
                        uint64_t sv = slots[v][r] + e.slot_inc[r];
                        if (sv > slots[e.to][e.slot_map[r]]) slots[e.to][e.slot_map[r]] = sv;
                    }
                }
            }
        }
        for (uint32_t i = 0; i < nodes.size(); ++i) {
            if (!nodes[i].gathered || total[i] == NEG) continue;
            allr.max_total_traversals = std::max(allr.max_total_traversals, total[i]);
            for (int r = 0; r < k; ++r)
                allr.max_per_agent_traversals = std::max(allr.max_per_agent_traversals, slots[i][r]);
        }
    }
    res.v = allr;
    return res;
}

// ---------------------------------------------------------------------------
// Per-protocol edge hooks

// Four-leg sweep invariant: a bump in the fourth leg implies every other
// agent already bumped at least twice (equivalently reached its third leg).
inline mc_hooks rvor_lemma_hooks() {
    mc_hooks h;
    h.on_edge = [](const sim_state& before, const event& e, const trace_record& rec,
                   const sim_state& after) -> std::string {
        if (e.kind != ev_kind::activate || !rec.bump) return {};
        auto& st = std::get<rvor_state>(before.agents[e.a].ps);
        if (st.leg != 3) return {};
        for (int i = 0; i < before.agent_count(); ++i) {
            if (i == e.a) continue;
            auto& o = std::get<rvor_state>(before.agents[i].ps);
            if (o.leg < 3) return "fourth-leg bump while another agent has fewer than two bumps";
        }
        return {};
    };
    return h;
}

// Mesh configurations stay connected and hole-free after every event.
inline mc_hooks rvmesh_invariant_hooks() {
    mc_hooks h;
    h.on_edge = [](const sim_state&, const event&, const trace_record&,
                   const sim_state& after) -> std::string {
        std::vector<node_id> occ;
        for (auto& a : after.agents) occ.push_back(a.node);
        static_config cfg(*after.topo, occ);
        if (!occupied_connected(cfg)) return "occupied set disconnected";
        if (has_holes(cfg)) return "occupied set has a hole";
        return {};
    };
    return h;
}

}  // namespace rva
