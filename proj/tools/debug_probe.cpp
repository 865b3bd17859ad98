// Scratch probe for inspecting livelocks and runs while developing.
#include <iostream>

#include "rva/json_io.hpp"
#include "rva/model_check.hpp"

using namespace rva;

static void dump_state(const sim_state& s) {
    std::cout << "  M=" << s.malicious << " |";
    for (int i = 0; i < s.agent_count(); ++i) {
        auto& a = s.agents[i];
        std::cout << " a" << i << (a.chi == chirality::forward ? "+" : "-") << "@";
        if (a.loc == loc_kind::at_node)
            std::cout << static_cast<int>(a.node);
        else
            std::cout << static_cast<int>(a.node) << ">" << static_cast<int>(a.transit_to);
        std::cout << "[" << state_string(a.ps) << "]";
    }
    std::cout << "\n";
}

static void show_livelock(const scenario& sc, const char* name) {
    mc_options opt;
    auto res = model_check(init_state(sc), opt);
    std::cout << name << ": " << verdict_name(res.v) << " states=" << res.states << "\n";
    if (auto* lv = std::get_if<v_livelock>(&res.v)) {
        sim_state s = init_state(sc);
        std::cout << "prefix (" << lv->prefix.size() << "):\n";
        dump_state(s);
        for (auto& e : lv->prefix) {
            std::cout << "  " << event_to_json(e).dump() << "\n";
            apply_event(s, e);
            dump_state(s);
        }
        std::cout << "cycle (" << lv->cycle.size() << "):\n";
        for (auto& e : lv->cycle) {
            std::cout << "  " << event_to_json(e).dump() << "\n";
            apply_event(s, e);
            dump_state(s);
        }
    }
    if (auto* ce = std::get_if<v_counterexample>(&res.v)) {
        std::cout << "reason: " << ce->reason << "\n";
        sim_state s = init_state(sc);
        dump_state(s);
        for (auto& e : ce->events) {
            std::cout << "  " << event_to_json(e).dump() << "\n";
            apply_event(s, e);
            dump_state(s);
        }
    }
}

int main(int argc, char** argv) {
    scenario sc;
    sc.topo = build_unoriented_ring(4, 0);
    sc.proto = protocol_kind::rv_ur;
    sc.placements = {1, 2, 3};
    sc.chir = {chirality::forward, chirality::forward, chirality::forward};
    sc.malicious = 0;
    show_livelock(sc, "rvur n=4 k=3 same-chirality");
    return 0;
}
