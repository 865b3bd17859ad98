#pragma once

#include <map>
#include <memory>
#include <random>
#include <unordered_map>

#include "rva/analysis.hpp"
#include "rva/verdict.hpp"

namespace rva {

struct scheduler_policy {
    virtual ~scheduler_policy() = default;
    virtual event choose(const sim_state& s, const std::vector<event>& enabled) = 0;
    // Deterministic policies may declare livelock on a revisited state.
    virtual bool declares_cycles() const { return false; }
};

// Every enabled event gets positive probability each step.
struct fair_random_policy : scheduler_policy {
    std::mt19937_64 rng;
    explicit fair_random_policy(uint64_t seed) : rng(seed) {}
    event choose(const sim_state&, const std::vector<event>& enabled) override {
        std::uniform_int_distribution<size_t> d(0, enabled.size() - 1);
        return enabled[d(rng)];
    }
};

// Heuristic adversary: relocations that keep the most agent pairs separated
// by the blocker's region, then activations that shrink pairwise distances
// the least. Smallest event encoding breaks ties.
struct greedy_blocker_policy : scheduler_policy {
    bool declares_cycles() const override { return true; }

    static int pairs_blocked(const sim_state& s, node_id m_target) {
        sim_state probe = s;
        probe.malicious = m_target;
        auto region = malicious_region(probe);
        region.push_back(m_target);
        std::vector<char> cut(s.topo->node_count, 0);
        for (node_id v : region) cut[v] = 1;
        std::vector<char> keep(s.topo->node_count, 0);
        for (node_id v = 0; v < s.topo->node_count; ++v) keep[v] = !cut[v];
        auto comps = detail::components_of(*s.topo, keep);
        std::vector<int> comp_of(s.topo->node_count, -1);
        for (size_t i = 0; i < comps.size(); ++i)
            for (node_id v : comps[i]) comp_of[v] = static_cast<int>(i);
        int blocked = 0;
        for (int i = 0; i < s.agent_count(); ++i)
            for (int j = i + 1; j < s.agent_count(); ++j) {
                node_id u = s.agents[i].loc == loc_kind::at_node ? s.agents[i].node : s.agents[i].transit_to;
                node_id v = s.agents[j].loc == loc_kind::at_node ? s.agents[j].node : s.agents[j].transit_to;
                if (u == v) continue;
                if (comp_of[u] < 0 || comp_of[v] < 0 || comp_of[u] != comp_of[v]) ++blocked;
            }
        return blocked;
    }

    static long pairwise_distance_sum(const sim_state& s) {
        // BFS distances on the full graph between agent head positions.
        long sum = 0;
        for (int i = 0; i < s.agent_count(); ++i) {
            node_id src = s.agents[i].loc == loc_kind::at_node ? s.agents[i].node : s.agents[i].transit_to;
            std::vector<int> dist(s.topo->node_count, -1);
            std::vector<node_id> q{src};
            dist[src] = 0;
            for (size_t h = 0; h < q.size(); ++h)
                for (auto& [p, w] : s.topo->adj[q[h]])
                    if (dist[w] < 0) {
                        dist[w] = dist[q[h]] + 1;
                        q.push_back(w);
                    }
            for (int j = i + 1; j < s.agent_count(); ++j) {
                node_id dst = s.agents[j].loc == loc_kind::at_node ? s.agents[j].node : s.agents[j].transit_to;
                sum += dist[dst] < 0 ? s.topo->node_count : dist[dst];
            }
        }
        return sum;
    }

    event choose(const sim_state& s, const std::vector<event>& enabled) override {
        const event* best = nullptr;
        long best_score = 0;
        for (auto& e : enabled) {
            long score;
            if (e.kind == ev_kind::relocate_malicious) {
                score = 1000000L * (1 + pairs_blocked(s, e.a));
            } else {
                sim_state n = s;
                apply_event(n, e);
                score = pairwise_distance_sum(n);
            }
            if (!best || score > best_score) {
                best = &e;
                best_score = score;
            }
        }
        return *best;  // enabled is sorted, so ties resolve to smallest encoding
    }
};

// Mirror-symmetric scheduler for unoriented rings with an even number of
// agents placed as two equal opposite-chirality half-chains. Drives the
// execution so the configuration stays symmetric forever.
struct symmetric_ring_policy : scheduler_policy {
    int mirror_sum = 0;  // mirror map: v -> (mirror_sum - v) mod n
    std::vector<int> partner;
    int next_pair = 0;

    bool declares_cycles() const override { return true; }

    explicit symmetric_ring_policy(const sim_state& s0) {
        const topology& t = *s0.topo;
        if (t.kind != topo_kind::unoriented_ring)
            throw error(errc::inapplicable_policy, "needs an unoriented ring");
        int k = s0.agent_count();
        if (k < 2 || k % 2 != 0)
            throw error(errc::inapplicable_policy, "needs an even number of agents");
        std::vector<node_id> pos;
        for (auto& a : s0.agents) pos.push_back(a.node);
        std::sort(pos.begin(), pos.end());
        // k consecutive nodes (as a cyclic chain)
        int start = -1;
        for (int c = 0; c < t.node_count; ++c) {
            bool ok = true;
            for (int i = 0; i < k; ++i) {
                node_id want = (c + i) % t.node_count;
                if (std::find(pos.begin(), pos.end(), want) == pos.end()) ok = false;
            }
            if (ok) {
                start = c;
                break;
            }
        }
        if (start < 0) throw error(errc::inapplicable_policy, "agents not on consecutive nodes");
        mirror_sum = (2 * start + k - 1) % t.node_count;
        if (s0.malicious < 0) throw error(errc::inapplicable_policy, "needs the malicious agent");
        for (int i = 0; i < k; ++i) {
            node_id p = s0.agents[i].node;
            if ((p == s0.malicious) ||
                std::find(pos.begin(), pos.end(), p) == pos.end())
                throw error(errc::inapplicable_policy, "bad placement");
        }
        // Chirality must mirror: partners sit at mirrored nodes with opposite chirality.
        partner.assign(k, -1);
        for (int i = 0; i < k; ++i) {
            node_id mi = mirror_of(s0.agents[i].node, t.node_count);
            for (int j = 0; j < k; ++j)
                if (s0.agents[j].node == mi) partner[i] = j;
            if (partner[i] < 0 || partner[i] == i)
                throw error(errc::inapplicable_policy, "no mirror partner");
            if (s0.agents[partner[i]].chi == s0.agents[i].chi)
                throw error(errc::inapplicable_policy, "mirror partners must have opposite chirality");
        }
        // The special node must lie outside the chain: agents may never reach it.
        for (int i = 0; i < k; ++i)
            if (s0.agents[i].node == t.special)
                throw error(errc::inapplicable_policy, "chain covers the special node");
    }

    node_id mirror_of(node_id v, int n) const { return ((mirror_sum - v) % n + n) % n; }

    event choose(const sim_state& s, const std::vector<event>& enabled) override {
        // Deliveries first: complete any move already granted.
        for (auto& e : enabled)
            if (e.kind == ev_kind::deliver) return e;
        // Round-robin over agents; before activating an agent whose commanded
        // move would enter the blocker's free region, park the blocker there.
        int k = s.agent_count();
        for (int off = 0; off < k; ++off) {
            int a = (next_pair + off) % k;
            if (s.agents[a].loc != loc_kind::at_node || agent_terminated(s, a)) continue;
            auto [ns, act] = dispatch_transition(s, a, false);
            if (is_move(act)) {
                node_id tgt = resolve_move_target(s, a, act);
                if (tgt != s.malicious) {
                    bool tgt_free = true;
                    for (auto& ag : s.agents)
                        if (ag.loc == loc_kind::at_node && ag.node == tgt) tgt_free = false;
                    if (tgt_free) {
                        // Block it if we can; otherwise the move would desymmetrize.
                        for (auto& e : enabled)
                            if (e.kind == ev_kind::relocate_malicious && e.a == tgt) return e;
                        continue;
                    }
                }
            }
            next_pair = (a + 1) % k;
            for (auto& e : enabled)
                if (e.kind == ev_kind::activate && e.a == a) return e;
        }
        // Nothing to schedule symmetrically: shuttle the blocker.
        for (auto& e : enabled)
            if (e.kind == ev_kind::relocate_malicious) return e;
        return enabled.front();
    }
};

struct run_limits {
    uint64_t max_events = 100000;
    uint64_t max_traversals = 100000;
};

struct run_result {
    verdict v;
    std::vector<trace_record> trace;
};

// Drives the engine with a policy until rendezvous, a declared cycle, a dead
// end, or the limits give out.
inline run_result run(sim_state s, scheduler_policy& policy, const run_limits& limits) {
    run_result out;
    std::unordered_map<std::string, uint64_t> seen;  // canonical key -> event index
    std::vector<event> history;
    if (policy.declares_cycles()) {
        auto key = canonical_key(s);
        seen.emplace(std::string(key.begin(), key.end()), 0);
    }
    for (uint64_t n = 0; n < limits.max_events; ++n) {
        if (agents_gathered(s)) {
            v_rendezvous r;
            r.node = s.agents.empty() ? -1 : s.agents[0].node;
            for (auto& a : s.agents) r.per_agent_traversals.push_back(a.traversals);
            r.total_traversals = s.total_traversals;
            out.v = r;
            return out;
        }
        auto enabled = enabled_events(s);
        if (enabled.empty()) {
            out.v = v_counterexample{history, "dead end: no enabled events", 0};
            return out;
        }
        event e = policy.choose(s, enabled);
        out.trace.push_back(apply_event(s, e));
        history.push_back(e);
        if (s.total_traversals > limits.max_traversals) {
            out.v = v_bound_exhausted{n + 1};
            return out;
        }
        if (policy.declares_cycles()) {
            auto key = canonical_key(s);
            std::string ks(key.begin(), key.end());
            auto [it, fresh] = seen.emplace(ks, history.size());
            if (!fresh) {
                v_livelock lv;
                lv.prefix.assign(history.begin(), history.begin() + it->second);
                lv.cycle.assign(history.begin() + it->second, history.end());
                lv.states_explored = seen.size();
                lv.cycle_keys.push_back(detail::fnv1a(key.data(), key.size()));
                out.v = lv;
                return out;
            }
        }
    }
    out.v = v_bound_exhausted{limits.max_events};
    return out;
}

}  // namespace rva
