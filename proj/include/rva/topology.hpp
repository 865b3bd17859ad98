#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "rva/error.hpp"

namespace rva {

using node_id = int;

enum class topo_kind : uint8_t { oriented_ring, unoriented_ring, oriented_mesh, general };

inline const char* topo_kind_name(topo_kind k) {
    switch (k) {
        case topo_kind::oriented_ring: return "oriented-ring";
        case topo_kind::unoriented_ring: return "unoriented-ring";
        case topo_kind::oriented_mesh: return "oriented-mesh";
        case topo_kind::general: return "general";
    }
    return "?";
}

enum class mesh_dir : uint8_t { north = 0, south = 1, east = 2, west = 3 };

inline mesh_dir inverse(mesh_dir d) {
    switch (d) {
        case mesh_dir::north: return mesh_dir::south;
        case mesh_dir::south: return mesh_dir::north;
        case mesh_dir::east: return mesh_dir::west;
        case mesh_dir::west: return mesh_dir::east;
    }
    return d;
}

inline const char* mesh_dir_name(mesh_dir d) {
    switch (d) {
        case mesh_dir::north: return "N";
        case mesh_dir::south: return "S";
        case mesh_dir::east: return "E";
        case mesh_dir::west: return "W";
    }
    return "?";
}

// Canonical order of the 12 cells at Manhattan distance 1 or 2 from a mesh node.
enum two_hop_slot : int {
    slot_n = 0, slot_s, slot_e, slot_w,
    slot_ne, slot_nw, slot_se, slot_sw,
    slot_nn, slot_ss, slot_ee, slot_ww,
    two_hop_slot_count = 12
};

inline const char* two_hop_slot_name(int i) {
    static const char* names[12] = {"N", "S", "E", "W", "NE", "NW", "SE", "SW", "NN", "SS", "EE", "WW"};
    return names[i];
}

struct two_hop_cell {
    bool exists = false;
    node_id node = -1;
};

// Immutable after construction; shared freely between concurrent readers.
struct topology {
    topo_kind kind = topo_kind::general;
    int node_count = 0;
    int rows = 0, cols = 0;             // mesh only
    node_id special = -1;               // ring special node, -1 if none
    // Per node, ordered (port label, neighbor) pairs.
    std::vector<std::vector<std::pair<std::string, node_id>>> adj;

    int degree(node_id v) const { return static_cast<int>(adj[v].size()); }

    bool has_edge(node_id u, node_id v) const {
        for (auto& [p, w] : adj[u])
            if (w == v) return true;
        return false;
    }

    std::vector<node_id> neighbors(node_id v) const {
        std::vector<node_id> out;
        out.reserve(adj[v].size());
        for (auto& [p, w] : adj[v]) out.push_back(w);
        return out;
    }

    // Rings: nodes are laid out cyclically, +1 is the global clockwise step.
    node_id ring_step(node_id v, int dir) const {
        return (v + dir + node_count) % node_count;
    }

    // Mesh coordinates: row 0 is the North border, col 0 the West border.
    node_id at(int r, int c) const { return r * cols + c; }
    int row_of(node_id v) const { return v / cols; }
    int col_of(node_id v) const { return v % cols; }
    bool in_grid(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

    std::optional<node_id> mesh_neighbor(node_id v, mesh_dir d) const {
        int r = row_of(v), c = col_of(v);
        switch (d) {
            case mesh_dir::north: r -= 1; break;
            case mesh_dir::south: r += 1; break;
            case mesh_dir::east: c += 1; break;
            case mesh_dir::west: c -= 1; break;
        }
        if (!in_grid(r, c)) return std::nullopt;
        return at(r, c);
    }

    bool connected() const {
        if (node_count == 0) return false;
        std::vector<char> seen(node_count, 0);
        std::queue<node_id> q;
        q.push(0);
        seen[0] = 1;
        int cnt = 1;
        while (!q.empty()) {
            node_id u = q.front();
            q.pop();
            for (auto& [p, w] : adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++cnt;
                    q.push(w);
                }
        }
        return cnt == node_count;
    }
};

namespace detail {
inline void validate_common(const topology& t) {
    for (node_id v = 0; v < t.node_count; ++v) {
        for (size_t i = 0; i < t.adj[v].size(); ++i) {
            auto& [pi, wi] = t.adj[v][i];
            if (wi < 0 || wi >= t.node_count)
                throw error(errc::invalid_topology, "neighbor out of range");
            if (!t.has_edge(wi, v))
                throw error(errc::invalid_topology, "adjacency not symmetric");
            for (size_t j = i + 1; j < t.adj[v].size(); ++j)
                if (t.adj[v][j].first == pi)
                    throw error(errc::invalid_topology, "duplicate port label at node");
        }
    }
}
}  // namespace detail

inline topology build_oriented_ring(int n, node_id special_index) {
    if (n < 3) throw error(errc::invalid_topology, "oriented ring needs n >= 3");
    if (special_index < 0 || special_index >= n)
        throw error(errc::invalid_topology, "special node out of range");
    topology t;
    t.kind = topo_kind::oriented_ring;
    t.node_count = n;
    t.special = special_index;
    t.adj.resize(n);
    for (node_id v = 0; v < n; ++v) {
        t.adj[v].push_back({"cw", (v + 1) % n});
        t.adj[v].push_back({"ccw", (v + n - 1) % n});
    }
    detail::validate_common(t);
    return t;
}

inline topology build_unoriented_ring(int n, node_id special_index) {
    if (n < 3) throw error(errc::invalid_topology, "unoriented ring needs n >= 3");
    if (special_index < 0 || special_index >= n)
        throw error(errc::invalid_topology, "special node out of range");
    topology t;
    t.kind = topo_kind::unoriented_ring;
    t.node_count = n;
    t.special = special_index;
    t.adj.resize(n);
    // Port labels carry no global orientation; direction is mediated per agent
    // by its chirality. Internally +1 is one of the two consistent orientations.
    for (node_id v = 0; v < n; ++v) {
        t.adj[v].push_back({"p0", (v + 1) % n});
        t.adj[v].push_back({"p1", (v + n - 1) % n});
    }
    detail::validate_common(t);
    return t;
}

inline topology build_oriented_mesh(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw error(errc::invalid_topology, "mesh needs rows,cols >= 1 and >= 2 nodes");
    topology t;
    t.kind = topo_kind::oriented_mesh;
    t.rows = rows;
    t.cols = cols;
    t.node_count = rows * cols;
    t.adj.resize(t.node_count);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            node_id v = t.at(r, c);
            if (r > 0) t.adj[v].push_back({"N", t.at(r - 1, c)});
            if (r + 1 < rows) t.adj[v].push_back({"S", t.at(r + 1, c)});
            if (c + 1 < cols) t.adj[v].push_back({"E", t.at(r, c + 1)});
            if (c > 0) t.adj[v].push_back({"W", t.at(r, c - 1)});
        }
    detail::validate_common(t);
    return t;
}

inline topology build_general(const std::vector<std::vector<node_id>>& adjacency) {
    topology t;
    t.kind = topo_kind::general;
    t.node_count = static_cast<int>(adjacency.size());
    if (t.node_count == 0) throw error(errc::invalid_topology, "empty graph");
    t.adj.resize(t.node_count);
    for (node_id v = 0; v < t.node_count; ++v)
        for (size_t i = 0; i < adjacency[v].size(); ++i)
            t.adj[v].push_back({"p" + std::to_string(i), adjacency[v][i]});
    detail::validate_common(t);
    if (!t.connected()) throw error(errc::invalid_topology, "graph not connected");
    return t;
}

// The 12 grid positions at Manhattan distance 1 or 2 from v, fixed canonical
// order N,S,E,W,NE,NW,SE,SW,NN,SS,EE,WW. Off-grid cells are explicit absent
// slots; the protocol layer maps absent to free.
inline std::array<two_hop_cell, two_hop_slot_count> two_hop_cells(const topology& t, node_id v) {
    if (t.kind != topo_kind::oriented_mesh)
        throw error(errc::unsupported_operation, "two_hop_cells requires an oriented mesh");
    static const int off[12][2] = {
        {-1, 0}, {1, 0}, {0, 1}, {0, -1},
        {-1, 1}, {-1, -1}, {1, 1}, {1, -1},
        {-2, 0}, {2, 0}, {0, 2}, {0, -2},
    };
    std::array<two_hop_cell, two_hop_slot_count> out{};
    int r = t.row_of(v), c = t.col_of(v);
    for (int i = 0; i < 12; ++i) {
        int rr = r + off[i][0], cc = c + off[i][1];
        if (t.in_grid(rr, cc)) out[i] = {true, t.at(rr, cc)};
    }
    return out;
}

}  // namespace rva
