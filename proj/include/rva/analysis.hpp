#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <vector>

#include "rva/topology.hpp"

namespace rva {

// A snapshot of which nodes the honest agents occupy.
struct static_config {
    const topology* topo = nullptr;
    std::vector<char> occupied;  // size node_count

    static_config() = default;
    static_config(const topology& t, const std::vector<node_id>& occ_nodes)
        : topo(&t), occupied(t.node_count, 0) {
        for (node_id v : occ_nodes) occupied[v] = 1;
    }

    bool is_free(node_id v) const { return !occupied[v]; }
    std::vector<node_id> occupied_nodes() const {
        std::vector<node_id> out;
        for (node_id v = 0; v < topo->node_count; ++v)
            if (occupied[v]) out.push_back(v);
        return out;
    }
};

// One step of a temporal reachability witness: (time step, node).
struct temporal_hop {
    int step;
    node_id node;
};

struct cut_certificate {
    std::vector<node_id> cut_set;                    // connected set of free nodes
    std::vector<std::vector<node_id>> components;    // >=2 occupied groups split by the cut
    std::vector<temporal_hop> temporal_path;         // separating only: blocker's access path
};

namespace detail {

// Connected components over the nodes where keep[v] != 0, graph edges only.
inline std::vector<std::vector<node_id>> components_of(const topology& t, const std::vector<char>& keep) {
    std::vector<int> comp(t.node_count, -1);
    std::vector<std::vector<node_id>> out;
    for (node_id s = 0; s < t.node_count; ++s) {
        if (!keep[s] || comp[s] >= 0) continue;
        int id = static_cast<int>(out.size());
        out.emplace_back();
        std::queue<node_id> q;
        q.push(s);
        comp[s] = id;
        while (!q.empty()) {
            node_id u = q.front();
            q.pop();
            out[id].push_back(u);
            for (auto& [p, w] : t.adj[u])
                if (keep[w] && comp[w] < 0) {
                    comp[w] = id;
                    q.push(w);
                }
        }
    }
    return out;
}

// Does removing `cut` leave the occupied nodes in >= 2 components of G - cut?
// Returns the grouped occupied nodes when it does.
inline std::optional<std::vector<std::vector<node_id>>> occupied_split_by(
    const static_config& c, const std::vector<char>& cut) {
    const topology& t = *c.topo;
    std::vector<char> keep(t.node_count, 0);
    for (node_id v = 0; v < t.node_count; ++v) keep[v] = !cut[v];
    auto comps = components_of(t, keep);
    std::vector<std::vector<node_id>> occ_groups;
    for (auto& comp : comps) {
        std::vector<node_id> g;
        for (node_id v : comp)
            if (c.occupied[v]) g.push_back(v);
        if (!g.empty()) {
            std::sort(g.begin(), g.end());
            occ_groups.push_back(std::move(g));
        }
    }
    if (occ_groups.size() >= 2) return occ_groups;
    return std::nullopt;
}

}  // namespace detail

inline std::vector<std::vector<node_id>> free_components(const static_config& c) {
    std::vector<char> free(c.topo->node_count, 0);
    for (node_id v = 0; v < c.topo->node_count; ++v) free[v] = c.is_free(v);
    return detail::components_of(*c.topo, free);
}

// A connected free vertex set whose removal leaves the occupied nodes in more
// than one component. Testing whole free components is complete: any connected
// free cut-set F lies inside one free component C, and removing C ⊇ F removes
// at least the nodes of F, so the disconnection persists (node removal never
// adds paths) while C itself stays connected.
inline std::optional<cut_certificate> is_separable(const static_config& c) {
    const topology& t = *c.topo;
    for (auto& comp : free_components(c)) {
        std::vector<char> cut(t.node_count, 0);
        for (node_id v : comp) cut[v] = 1;
        if (auto groups = detail::occupied_split_by(c, cut)) {
            cut_certificate cert;
            cert.cut_set = comp;
            std::sort(cert.cut_set.begin(), cert.cut_set.end());
            cert.components = std::move(*groups);
            return cert;
        }
    }
    return std::nullopt;
}

// Direct enumeration of all connected free subsets; oracle for is_separable.
inline bool brute_force_separable(const static_config& c) {
    const topology& t = *c.topo;
    std::vector<node_id> free_nodes;
    for (node_id v = 0; v < t.node_count; ++v)
        if (c.is_free(v)) free_nodes.push_back(v);
    if (free_nodes.size() > 20)
        throw error(errc::oracle_too_large, "more than 20 free nodes");
    int m = static_cast<int>(free_nodes.size());
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<char> cut(t.node_count, 0);
        std::vector<node_id> sel;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) {
                cut[free_nodes[i]] = 1;
                sel.push_back(free_nodes[i]);
            }
        // subset must be connected
        std::vector<char> seen(t.node_count, 0);
        std::queue<node_id> q;
        q.push(sel[0]);
        seen[sel[0]] = 1;
        size_t cnt = 1;
        while (!q.empty()) {
            node_id u = q.front();
            q.pop();
            for (auto& [p, w] : t.adj[u])
                if (cut[w] && !seen[w]) {
                    seen[w] = 1;
                    ++cnt;
                    q.push(w);
                }
        }
        if (cnt != sel.size()) continue;
        if (detail::occupied_split_by(c, cut)) return true;
    }
    return false;
}

// All nodes of next_free connected, inside the next_free-induced subgraph, to
// prev_reach ∩ next_free. Models the blocker surviving the step (its node
// stays free) and then moving arbitrarily far through currently-free nodes.
inline std::vector<char> malicious_reach_step(const std::vector<char>& prev_reach,
                                              const std::vector<char>& next_free,
                                              const topology& t) {
    std::vector<char> reach(t.node_count, 0);
    std::queue<node_id> q;
    for (node_id v = 0; v < t.node_count; ++v)
        if (prev_reach[v] && next_free[v]) {
            reach[v] = 1;
            q.push(v);
        }
    while (!q.empty()) {
        node_id u = q.front();
        q.pop();
        for (auto& [p, w] : t.adj[u])
            if (next_free[w] && !reach[w]) {
                reach[w] = 1;
                q.push(w);
            }
    }
    return reach;
}

struct config_history {
    std::vector<static_config> configs;  // C_0 .. C_t over one topology

    const topology& topo() const { return *configs.front().topo; }
};

namespace detail {

inline std::vector<char> free_mask(const static_config& c) {
    std::vector<char> f(c.topo->node_count, 0);
    for (node_id v = 0; v < c.topo->node_count; ++v) f[v] = c.is_free(v);
    return f;
}

// Reconstruct a step-stamped path from some node of `targets` back to time 0,
// walking the per-step reach sets.
inline std::vector<temporal_hop> temporal_witness(const config_history& h,
                                                  const std::vector<std::vector<char>>& reach_by_step,
                                                  node_id target) {
    const topology& t = h.topo();
    std::vector<temporal_hop> path;
    node_id cur = target;
    for (int s = static_cast<int>(reach_by_step.size()) - 1; s >= 0; --s) {
        // Walk within free(C_s) from cur back to a node that was reachable at s-1.
        auto free_s = free_mask(h.configs[s]);
        std::vector<node_id> par(t.node_count, -2);
        std::queue<node_id> q;
        q.push(cur);
        par[cur] = -1;
        node_id anchor = -1;
        auto anchored = [&](node_id v) {
            return s == 0 ? free_s[v] : (reach_by_step[s - 1][v] && free_s[v]);
        };
        if (anchored(cur)) anchor = cur;
        while (!q.empty() && anchor < 0) {
            node_id u = q.front();
            q.pop();
            for (auto& [p, w] : t.adj[u]) {
                if (!free_s[w] || par[w] != -2 || !reach_by_step[s][w]) continue;
                par[w] = u;
                if (anchored(w)) {
                    anchor = w;
                    break;
                }
                q.push(w);
            }
        }
        if (anchor < 0) anchor = cur;  // already anchored or degenerate
        std::vector<temporal_hop> seg;
        for (node_id v = anchor; v != -1; v = par[v]) seg.push_back({s, v});
        // seg runs anchor -> cur; keep chronological order within the step
        path.insert(path.begin(), seg.begin(), seg.end());
        cur = anchor;
    }
    return path;
}

}  // namespace detail

// Definition-2 style check: fold blocker reachability over the history, one
// branch per free component of C_0, and test whether C_t is separable with a
// cut component the blocker can actually reach.
inline std::optional<cut_certificate> is_separating(const config_history& h) {
    if (h.configs.empty()) return std::nullopt;
    const topology& t = h.topo();
    const static_config& last = h.configs.back();

    auto cert0 = is_separable(last);
    if (!cert0) return std::nullopt;
    if (h.configs.size() == 1) return cert0;  // initial separable configs qualify

    for (auto& branch : free_components(h.configs.front())) {
        std::vector<std::vector<char>> reach_by_step;
        std::vector<char> reach(t.node_count, 0);
        for (node_id v : branch) reach[v] = 1;
        reach_by_step.push_back(reach);
        for (size_t s = 1; s < h.configs.size(); ++s) {
            reach = malicious_reach_step(reach, detail::free_mask(h.configs[s]), t);
            reach_by_step.push_back(reach);
        }
        // A reachable cut component?
        for (auto& comp : free_components(last)) {
            std::vector<char> cut(t.node_count, 0);
            bool touched = false;
            for (node_id v : comp) {
                cut[v] = 1;
                if (reach[v]) touched = true;
            }
            if (!touched) continue;
            if (auto groups = detail::occupied_split_by(last, cut)) {
                cut_certificate cert;
                cert.cut_set = comp;
                std::sort(cert.cut_set.begin(), cert.cut_set.end());
                cert.components = std::move(*groups);
                node_id witness = -1;
                for (node_id v : cert.cut_set)
                    if (reach[v]) {
                        witness = v;
                        break;
                    }
                cert.temporal_path = detail::temporal_witness(h, reach_by_step, witness);
                return cert;
            }
        }
    }
    return std::nullopt;
}

// Independent re-check of a cut certificate against a configuration: the cut
// is free and connected, and deleting it leaves occupied nodes in more than
// one component.
inline bool certificate_disconnects(const static_config& c, const cut_certificate& cert) {
    const topology& t = *c.topo;
    if (cert.cut_set.empty()) return false;
    for (node_id v : cert.cut_set)
        if (c.occupied[v]) return false;
    std::vector<char> in_cut(t.node_count, 0);
    for (node_id v : cert.cut_set) in_cut[v] = 1;
    std::vector<char> seen(t.node_count, 0);
    std::vector<node_id> stack{cert.cut_set.front()};
    seen[stack[0]] = 1;
    size_t cnt = 1;
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        for (auto& [p, w] : t.adj[u])
            if (in_cut[w] && !seen[w]) {
                seen[w] = 1;
                ++cnt;
                stack.push_back(w);
            }
    }
    if (cnt != cert.cut_set.size()) return false;
    std::vector<char> cutv(t.node_count, 0);
    for (node_id v : cert.cut_set) cutv[v] = 1;
    return detail::occupied_split_by(c, cutv).has_value();
}

inline bool occupied_connected(const static_config& c) {
    auto comps = detail::components_of(*c.topo, c.occupied);
    return comps.size() == 1;
}

// Mesh holes: a free 4-connected region touching no border cell.
inline bool has_holes(const static_config& c) {
    if (c.topo->kind != topo_kind::oriented_mesh)
        throw error(errc::unsupported_operation, "has_holes requires a mesh");
    const topology& t = *c.topo;
    for (auto& comp : free_components(c)) {
        bool touches_border = false;
        for (node_id v : comp) {
            int r = t.row_of(v), col = t.col_of(v);
            if (r == 0 || col == 0 || r == t.rows - 1 || col == t.cols - 1) {
                touches_border = true;
                break;
            }
        }
        if (!touches_border) return true;
    }
    return false;
}

}  // namespace rva
