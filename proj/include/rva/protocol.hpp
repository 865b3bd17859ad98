#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rva/error.hpp"
#include "rva/topology.hpp"

namespace rva {

// An agent's private, ring-consistent notion of clockwise: whether its
// my-clockwise coincides with the internal +1 orientation or the -1 one.
enum class chirality : uint8_t { forward = 0, reverse = 1 };

inline int chirality_step(chirality c) { return c == chirality::forward ? 1 : -1; }

enum class ring_dir : uint8_t { my_cw = 0, my_ccw = 1 };

inline ring_dir inverse(ring_dir d) { return d == ring_dir::my_cw ? ring_dir::my_ccw : ring_dir::my_cw; }

// ---------------------------------------------------------------------------
// Protocol states

struct rvor_state {
    uint8_t leg = 0;             // completed-leg counter i, 0..4
    ring_dir dir = ring_dir::my_cw;
    bool stopped = false;

    bool operator==(const rvor_state&) const = default;
};

enum class rvur_phase : uint8_t {
    initial = 0,
    transformer1,
    searcher,
    stopper,
    collector,         // gathering its node into followers
    collector_moving,  // hauling the followers clockwise until it meets a final
    final_state,
    transformer2,
    terminator,
    following,
};

inline const char* rvur_phase_name(rvur_phase p) {
    switch (p) {
        case rvur_phase::initial: return "initial";
        case rvur_phase::transformer1: return "transformer-1";
        case rvur_phase::searcher: return "searcher";
        case rvur_phase::stopper: return "stopper";
        case rvur_phase::collector: return "collector";
        case rvur_phase::collector_moving: return "collector-moving";
        case rvur_phase::final_state: return "final";
        case rvur_phase::transformer2: return "transformer-2";
        case rvur_phase::terminator: return "terminator";
        case rvur_phase::following: return "following";
    }
    return "?";
}

struct rvur_state {
    rvur_phase phase = rvur_phase::initial;
    // Unoccupied special-node sightings in the current mobile phase; the third
    // one proves two fruitless circuits of the ring.
    uint8_t ostar_unoccupied_visits = 0;
    // A searcher that has not yet completed a single hop must not read the
    // node it is still standing on; cleared by the engine on hop completion.
    bool fresh_searcher = false;
    // Moving collectors sweep in this direction, bouncing off the blocker.
    ring_dir sweep_dir = ring_dir::my_cw;
    // Consecutive blocker bounces with nothing new collected; the third one
    // proves the open path was swept end to end twice.
    uint8_t clean_bounces = 0;

    bool operator==(const rvur_state&) const = default;
};

struct rvmesh_state {
    // Direction of the move this agent just made as part of a simultaneous
    // swap; vetoes an immediate inverse swap. Cleared by the next activation.
    std::optional<mesh_dir> swap_latch;

    bool operator==(const rvmesh_state&) const = default;
};

using protocol_state = std::variant<rvor_state, rvur_state, rvmesh_state>;

// Compact encoding used for hashing and trace fields. States of different
// protocols never mix within one simulation, so no tag is needed.
inline uint16_t encode_state(const protocol_state& ps) {
    if (auto* s = std::get_if<rvor_state>(&ps))
        return static_cast<uint16_t>((s->leg << 2) | (static_cast<int>(s->dir) << 1) | (s->stopped ? 1 : 0));
    if (auto* s = std::get_if<rvur_state>(&ps))
        return static_cast<uint16_t>((static_cast<int>(s->phase) << 6) | (s->clean_bounces << 4) |
                                     (s->ostar_unoccupied_visits << 2) |
                                     (static_cast<int>(s->sweep_dir) << 1) | (s->fresh_searcher ? 1 : 0));
    auto& s = std::get<rvmesh_state>(ps);
    return static_cast<uint16_t>(s.swap_latch ? 1 + static_cast<int>(*s.swap_latch) : 0);
}

inline std::string state_string(const protocol_state& ps) {
    if (auto* s = std::get_if<rvor_state>(&ps)) {
        std::string out = "rvor:i=" + std::to_string(s->leg) +
                          ",dir=" + (s->dir == ring_dir::my_cw ? "cw" : "ccw");
        if (s->stopped) out += ",stopped";
        return out;
    }
    if (auto* s = std::get_if<rvur_state>(&ps)) {
        std::string out = std::string("rvur:") + rvur_phase_name(s->phase);
        if (s->phase == rvur_phase::initial)
            out += ":v=" + std::to_string(s->ostar_unoccupied_visits);
        return out;
    }
    auto& s = std::get<rvmesh_state>(ps);
    std::string out = "rvmesh";
    if (s.swap_latch) out += std::string(":latch=") + mesh_dir_name(*s.swap_latch);
    return out;
}

// ---------------------------------------------------------------------------
// Actions and observations

struct act_stay {};
struct act_move_ring {
    ring_dir dir;
};
struct act_move_mesh {
    mesh_dir dir;
};
struct act_stay_and_exit {};

using agent_action = std::variant<act_stay, act_move_ring, act_move_mesh, act_stay_and_exit>;

inline bool is_move(const agent_action& a) {
    return std::holds_alternative<act_move_ring>(a) || std::holds_alternative<act_move_mesh>(a);
}

// What one honest agent may read at one activation on a ring.
struct ring_obs {
    bool at_special = false;
    bool last_attempt_bumped = false;
    std::vector<protocol_state> colocated;  // other at-node agents here; never self
    int degree = 2;
};

// Mesh observation: honest-agent occupancy of the 12 two-hop cells (absent
// cells reported free) plus co-located states.
struct mesh_obs {
    std::array<bool, two_hop_slot_count> occupancy{};
    std::vector<protocol_state> colocated;
};

// ---------------------------------------------------------------------------
// RV-OR

namespace detail {
inline bool any_stopped_rvor(const std::vector<protocol_state>& col) {
    for (auto& ps : col)
        if (auto* s = std::get_if<rvor_state>(&ps); s && s->stopped) return true;
    return false;
}
}  // namespace detail

// Four-leg sweep protocol for oriented rings. A leg ends on a bump, on the
// special node, or on meeting a stopped agent; the leg counter picks the rule.
inline std::pair<rvor_state, agent_action> rvor_transition(const rvor_state& s, const ring_obs& o) {
    if (s.stopped) throw error(errc::protocol_fault, "stopped agent activated");
    bool met_stopped = detail::any_stopped_rvor(o.colocated);
    bool trigger = o.last_attempt_bumped || o.at_special || met_stopped;
    if (!trigger) return {s, act_move_ring{s.dir}};

    rvor_state n = s;
    n.leg = static_cast<uint8_t>(s.leg + 1);
    if (n.leg > 4) throw error(errc::protocol_fault, "leg counter overflow");

    if (met_stopped) {
        n.stopped = true;
        return {n, act_stay{}};
    }
    if (n.leg == 1 || n.leg == 2) {
        if (o.at_special) {
            n.stopped = true;
            return {n, act_stay{}};
        }
        n.dir = inverse(n.dir);  // bumped
        return {n, act_move_ring{n.dir}};
    }
    if (n.leg == 3) {
        n.dir = inverse(n.dir);  // special node or bump both reverse here
        return {n, act_move_ring{n.dir}};
    }
    n.stopped = true;  // leg 4: special node or bump both stop
    return {n, act_stay{}};
}

// ---------------------------------------------------------------------------
// RV-UR

namespace detail {

struct colocated_summary {
    int stoppers = 0, finals = 0, transformers1 = 0, transformers2 = 0;
    int collectors = 0, haulers = 0, terminators = 0, searchers = 0, initials = 0, followings = 0;
    int total = 0;

    int settled() const { return stoppers + finals + transformers1 + transformers2; }
    int any_collector() const { return collectors + haulers; }
};

inline colocated_summary summarize_rvur(const std::vector<protocol_state>& col) {
    colocated_summary s;
    for (auto& ps : col) {
        auto* u = std::get_if<rvur_state>(&ps);
        if (!u) continue;
        ++s.total;
        switch (u->phase) {
            case rvur_phase::initial: ++s.initials; break;
            case rvur_phase::transformer1: ++s.transformers1; break;
            case rvur_phase::searcher: ++s.searchers; break;
            case rvur_phase::stopper: ++s.stoppers; break;
            case rvur_phase::collector: ++s.collectors; break;
            case rvur_phase::collector_moving: ++s.haulers; break;
            case rvur_phase::final_state: ++s.finals; break;
            case rvur_phase::transformer2: ++s.transformers2; break;
            case rvur_phase::terminator: ++s.terminators; break;
            case rvur_phase::following: ++s.followings; break;
        }
    }
    return s;
}

}  // namespace detail

// Gather-by-parity protocol for unoriented rings. Case structure follows the
// eight named states; co-location conditions quantify over settled agents
// (stopper/final/transformer) so that passers-by do not wedge the pipeline.
inline std::pair<rvur_state, agent_action> rvur_transition(const rvur_state& s, const ring_obs& o) {
    using P = rvur_phase;
    auto col = detail::summarize_rvur(o.colocated);
    rvur_state n = s;

    auto stay = [&](P p) {
        n.phase = p;
        if (p != s.phase) {
            n.ostar_unoccupied_visits = 0;
            n.fresh_searcher = false;
            n.sweep_dir = ring_dir::my_cw;
            n.clean_bounces = 0;
        }
        return std::pair<rvur_state, agent_action>{n, act_stay{}};
    };

    switch (s.phase) {
        case P::initial: {
            if (o.last_attempt_bumped) {
                // Case 0.2. "Hosts only you" is read as hosting no settled
                // agent: the first bumper of a blocked stack of still-moving
                // agents anchors the gathering here.
                if (col.total == col.initials) return stay(P::stopper);
                // Blocked alongside settled agents: passing through is not an
                // option, so join their pipeline right here (even on the
                // special node).
                if (col.settled() == 1 && col.stoppers == 1) return stay(P::transformer1);
                if (col.settled() > 0 && col.settled() == col.finals) return stay(P::stopper);
                if (col.stoppers > 0 && col.finals > 0) return stay(P::transformer2);
                return {n, act_stay{}};  // conversions in flight; retry later
            }
            if (col.terminators > 0) return stay(P::terminator);   // late arrival at a finished gathering
            if (col.any_collector() > 0) return stay(P::following);  // collectors collect everyone they meet
            if (o.at_special) {
                if (col.total == 0) {
                    n.ostar_unoccupied_visits = static_cast<uint8_t>(s.ostar_unoccupied_visits + 1);
                    if (n.ostar_unoccupied_visits >= 3) return stay(P::stopper);  // Case 0.1
                }
                return {n, act_move_ring{ring_dir::my_cw}};  // occupied special node: pass through
            }
            if (col.settled() == 0) return {n, act_move_ring{ring_dir::my_cw}};
            if (col.settled() == 1 && col.stoppers == 1) return stay(P::transformer1);  // Case 0.3.1
            if (col.settled() == col.finals) return stay(P::stopper);                   // Case 0.3.2
            if (col.stoppers > 0 && col.finals > 0) return stay(P::transformer2);       // Case 0.3.3
            return {n, act_stay{}};  // pipeline not settled here yet; wait
        }
        case P::transformer1: {
            if (col.terminators > 0) return stay(P::terminator);
            if (col.any_collector() > 0) return stay(P::stopper);  // a collection is already under way
            if (col.stoppers == 0 && col.transformers2 == 0) {
                n.phase = P::searcher;
                n.ostar_unoccupied_visits = 0;
                n.fresh_searcher = true;
                return {n, act_move_ring{ring_dir::my_ccw}};
            }
            return {n, act_stay{}};
        }
        case P::searcher: {
            if (s.fresh_searcher) {
                // Still standing on the departure node (the engine clears the
                // flag on arrival). Never read this node as the remote
                // gathering; if the blocker walls off the search direction,
                // collect this very node and haul out the other way instead.
                if (!o.last_attempt_bumped) return {n, act_move_ring{ring_dir::my_ccw}};
                if (col.total == 0 || col.settled() == col.total) return stay(P::collector);
                return {n, act_stay{}};  // co-located pipeline still converting
            }
            if (col.terminators > 0) return stay(P::terminator);  // the gathering already finished
            if (col.any_collector() > 0) return stay(P::following);  // a collection passes: join it
            // Stops on a bump or on reaching a node that holds stopped agents.
            bool arrived_at_stop = col.stoppers > 0 || col.finals > 0;
            if (!o.last_attempt_bumped && !arrived_at_stop) {
                if (o.at_special && col.total == 0) {
                    // Two full circuits found nobody stopped anywhere: anchor
                    // here so the moving agents can find this one instead.
                    n.ostar_unoccupied_visits = static_cast<uint8_t>(s.ostar_unoccupied_visits + 1);
                    if (n.ostar_unoccupied_visits >= 3) return stay(P::stopper);
                }
                return {n, act_move_ring{ring_dir::my_ccw}};
            }
            if (col.total == 0) return stay(P::collector);  // Case 2.2, empty node
            if (col.settled() == col.total) {  // settled group: read its parity
                if (col.settled() == col.finals) return stay(P::stopper);  // Case 2.1
                return stay(P::collector);                                 // Case 2.2
            }
            return {n, act_stay{}};  // group still converting; read it once settled
        }
        case P::stopper: {
            if (col.transformers1 > 0 || col.transformers2 > 0) return stay(P::final_state);  // 3.1
            if (col.any_collector() > 0) return stay(P::following);                           // 3.2
            if (col.terminators > 0) return stay(P::terminator);                              // 3.3
            return {n, act_stay{}};
        }
        case P::collector: {
            // Wait until everyone at the node has been collected (stoppers and
            // finals convert on seeing the collector), then start sweeping.
            if (col.terminators > 0) return stay(P::terminator);
            if (col.haulers > 0) return stay(P::following);  // a passing sweep takes over
            if (col.total == col.followings) {
                n.phase = P::collector_moving;
                n.ostar_unoccupied_visits = 0;
                n.sweep_dir = ring_dir::my_cw;
                return {n, act_move_ring{n.sweep_dir}};
            }
            return {n, act_stay{}};
        }
        case P::collector_moving: {
            if (col.terminators > 0) return stay(P::terminator);  // gathering already finished
            if (col.collectors > 0 || col.haulers > 0)
                return stay(P::following);  // two sweeps met: the first to act joins the other
            if (o.last_attempt_bumped) {
                // Bounce off the blocker and sweep the other way; the ring
                // minus the blocker is a path the sweep covers end to end.
                // The third bounce with nothing new collected proves that
                // path was swept twice with everyone already aboard.
                n.clean_bounces = static_cast<uint8_t>(s.clean_bounces + 1);
                if (n.clean_bounces >= 3) return stay(P::terminator);
                n.sweep_dir = inverse(s.sweep_dir);
                return {n, act_move_ring{n.sweep_dir}};
            }
            if (col.total == col.followings) {
                if (o.at_special) {
                    // Third special-node pass with nothing new collected: the
                    // whole reachable ring has been swept twice, so everyone
                    // is aboard and the sweep finishes here.
                    n.ostar_unoccupied_visits = static_cast<uint8_t>(s.ostar_unoccupied_visits + 1);
                    if (n.ostar_unoccupied_visits >= 3) return stay(P::terminator);
                }
                return {n, act_move_ring{s.sweep_dir}};  // engine moves followers along
            }
            // someone new at this node is still converting: wait, and restart
            // the clean-sweep progress counts
            n.ostar_unoccupied_visits = 0;
            n.clean_bounces = 0;
            return {n, act_stay{}};
        }
        case P::final_state: {
            if (col.any_collector() > 0) return stay(P::stopper);  // 5.1
            if (col.terminators > 0) return stay(P::terminator);   // 5.2
            return {n, act_stay{}};
        }
        case P::transformer2: {
            if (col.terminators > 0) return stay(P::terminator);
            if (col.any_collector() > 0) return stay(P::stopper);
            if (col.stoppers == 0 && col.transformers1 == 0) return stay(P::final_state);  // Case 6
            return {n, act_stay{}};
        }
        case P::following: {
            if (col.terminators > 0) return stay(P::terminator);
            return {n, act_stay{}};  // movement is driven by the collector
        }
        case P::terminator: {
            if (col.total == col.terminators) return {n, act_stay_and_exit{}};
            return {n, act_stay{}};
        }
    }
    throw error(errc::protocol_fault, "unhandled rvur phase");
}

// ---------------------------------------------------------------------------
// RV-Mesh

// Classify a two-hop occupancy view into a move or Stay. Every commanded move
// targets an occupied cell.
inline std::optional<mesh_dir> classify_view(const std::array<bool, two_hop_slot_count>& v) {
    bool N = v[slot_n], S = v[slot_s], E = v[slot_e], W = v[slot_w];
    int deg = int(N) + int(S) + int(E) + int(W);
    if (deg == 1 && E) return mesh_dir::east;                                   // (a)
    if (E && S && v[slot_se] && !N && !W) return mesh_dir::east;                // (b)
    if (W && S && !N && !E) return mesh_dir::west;                              // (c,d)
    if (deg == 1 && W && (v[slot_ww] || v[slot_nw] || v[slot_sw])) return mesh_dir::west;   // (e,f,g)
    if (deg == 1 && S) return mesh_dir::south;                                  // (h)
    if (deg == 1 && N && (v[slot_nn] || v[slot_nw] || v[slot_ne])) return mesh_dir::north;  // (i,l,m)
    return std::nullopt;
}

// The latch only vetoes participation in a simultaneous swap (checked by the
// engine); the classified move itself always executes, which on the inverse
// direction merges the agent onto its swap partner's node. Any activation
// clears the latch.
inline std::pair<rvmesh_state, agent_action> rvmesh_transition(const rvmesh_state& s, const mesh_obs& o) {
    rvmesh_state n;
    n.swap_latch = std::nullopt;
    auto c = classify_view(o.occupancy);
    if (!c) return {n, act_stay{}};
    return {n, act_move_mesh{*c}};
}

// True when this agent must not take part in a swap across `dir`: it has just
// swapped the other way and the classified move would undo it simultaneously.
inline bool rvmesh_swap_vetoed(const rvmesh_state& s, mesh_dir dir) {
    return s.swap_latch && inverse(*s.swap_latch) == dir;
}

}  // namespace rva
