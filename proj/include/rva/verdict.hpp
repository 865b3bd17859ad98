#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rva/sim.hpp"

namespace rva {

struct v_rendezvous {
    node_id node = -1;
    std::vector<uint64_t> per_agent_traversals;
    uint64_t total_traversals = 0;
};

// A reachable cycle of states containing no rendezvous state; replaying
// prefix then cycle returns to the cycle's first state.
struct v_livelock {
    std::vector<event> prefix;
    std::vector<event> cycle;
    std::vector<uint64_t> cycle_keys;  // canonical-state hashes along the cycle
    uint64_t states_explored = 0;
};

struct v_counterexample {
    std::vector<event> events;
    std::string reason;
    uint64_t states_explored = 0;
};

struct v_all_rendezvous {
    uint64_t states_explored = 0;
    uint64_t max_total_traversals = 0;
    uint64_t max_per_agent_traversals = 0;
    bool traversal_divergence = false;  // a reachable cycle performs traversals
};

struct v_bound_exhausted {
    uint64_t states_explored = 0;
};

using verdict = std::variant<v_rendezvous, v_livelock, v_counterexample, v_all_rendezvous, v_bound_exhausted>;

inline const char* verdict_name(const verdict& v) {
    if (std::holds_alternative<v_rendezvous>(v)) return "rendezvous";
    if (std::holds_alternative<v_livelock>(v)) return "livelock";
    if (std::holds_alternative<v_counterexample>(v)) return "counterexample";
    if (std::holds_alternative<v_all_rendezvous>(v)) return "all-schedules-rendezvous";
    return "bound-exhausted";
}

}  // namespace rva
