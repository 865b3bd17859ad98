#include <catch2/catch_amalgamated.hpp>

#include "rva/json_io.hpp"
#include "rva/model_check.hpp"
#include "rva/scenario.hpp"

using namespace rva;

namespace {

scenario oriented(int n, std::vector<node_id> agents, int m) {
    scenario sc;
    sc.topo = build_oriented_ring(n, 0);
    sc.proto = protocol_kind::rv_or;
    sc.placements = std::move(agents);
    sc.malicious = m;
    return sc;
}

scenario mesh_scenario(int rows, int cols, std::vector<node_id> agents, int m) {
    scenario sc;
    sc.topo = build_oriented_mesh(rows, cols);
    sc.proto = protocol_kind::rv_mesh;
    sc.placements = std::move(agents);
    sc.malicious = m;
    sc.allow_stacked = true;
    return sc;
}

}  // namespace

TEST_CASE("model check: rv-or on a small ring, all schedules gather") {
    auto sc = oriented(4, {1, 3}, 2);
    auto s0 = init_state(sc);
    auto hooks = rvor_lemma_hooks();
    auto res = model_check(s0, {}, &hooks);
    REQUIRE(std::holds_alternative<v_all_rendezvous>(res.v));
    auto& a = std::get<v_all_rendezvous>(res.v);
    REQUIRE_FALSE(a.traversal_divergence);
    REQUIRE(a.max_per_agent_traversals <= 8u * 4u);
    REQUIRE(res.violations == 0);
}

TEST_CASE("model check: rv-ur with odd k on a small ring gathers") {
    scenario sc;
    sc.topo = build_unoriented_ring(4, 0);
    sc.proto = protocol_kind::rv_ur;
    sc.placements = {1, 2, 3};
    sc.chir = {chirality::forward, chirality::forward, chirality::forward};
    sc.malicious = 0;
    auto res = model_check(init_state(sc), {});
    INFO("verdict: " << verdict_name(res.v));
    if (auto* ce = std::get_if<v_counterexample>(&res.v)) {
        INFO("reason: " << ce->reason);
        REQUIRE(ce->reason.empty());
    }
    REQUIRE(std::holds_alternative<v_all_rendezvous>(res.v));
}

TEST_CASE("model check: even k on the mirrored configuration cannot gather") {
    scenario sc = demo_even_ring(6, 2);
    mc_options opt;
    opt.fair = false;  // the impossibility adversary controls scheduling
    auto res = model_check(init_state(sc), opt);
    bool nongathering = std::holds_alternative<v_livelock>(res.v) ||
                        std::holds_alternative<v_counterexample>(res.v);
    REQUIRE(nongathering);
}

TEST_CASE("model check: livelock certificates replay to their first state") {
    scenario sc = demo_even_ring(6, 2);
    mc_options opt;
    opt.fair = false;
    auto res = model_check(init_state(sc), opt);
    if (auto* lv = std::get_if<v_livelock>(&res.v)) {
        sim_state s = init_state(sc);
        for (auto& e : lv->prefix) apply_event(s, e);
        auto k0 = canonical_key(s);
        REQUIRE(detail::fnv1a(k0.data(), k0.size()) == lv->cycle_keys.front());
        for (auto& e : lv->cycle) apply_event(s, e);
        REQUIRE(canonical_key(s) == k0);
        REQUIRE_FALSE(agents_gathered(s));
    }
}

TEST_CASE("model check: full 2x2 mesh block gathers despite swaps") {
    auto sc = mesh_scenario(2, 2, {0, 1, 2, 3}, -1);
    auto hooks = rvmesh_invariant_hooks();
    auto res = model_check(init_state(sc), {}, &hooks);
    CAPTURE(verdict_name(res.v));
    REQUIRE(std::holds_alternative<v_all_rendezvous>(res.v));
    auto& a = std::get<v_all_rendezvous>(res.v);
    REQUIRE_FALSE(a.traversal_divergence);
    REQUIRE(res.violations == 0);
}

TEST_CASE("model check: L-shaped mesh config with a blocker gathers") {
    auto t = build_oriented_mesh(3, 3);
    auto sc = mesh_scenario(3, 3, {t.at(0, 0), t.at(1, 0), t.at(1, 1)}, t.at(2, 2));
    auto hooks = rvmesh_invariant_hooks();
    auto res = model_check(init_state(sc), {}, &hooks);
    REQUIRE(std::holds_alternative<v_all_rendezvous>(res.v));
    REQUIRE(res.violations == 0);
}

TEST_CASE("model check: two-node mesh configs merge within k+1 traversals") {
    auto t = build_oriented_mesh(3, 3);
    for (int k : {2, 3, 4}) {
        for (int split = 1; split < k; ++split) {
            std::vector<node_id> agents;
            for (int i = 0; i < split; ++i) agents.push_back(t.at(1, 1));
            for (int i = split; i < k; ++i) agents.push_back(t.at(1, 2));
            auto sc = mesh_scenario(3, 3, agents, t.at(0, 0));
            auto res = model_check(init_state(sc), {});
            REQUIRE(std::holds_alternative<v_all_rendezvous>(res.v));
            auto& a = std::get<v_all_rendezvous>(res.v);
            REQUIRE(a.max_total_traversals <= static_cast<uint64_t>(k) + 1);
        }
    }
}

TEST_CASE("model check: verdict variant is stable under permuted exploration") {
    auto sc = oriented(5, {1, 3}, 0);
    auto base = model_check(init_state(sc), {});
    for (uint64_t seed : {11ull, 22ull, 33ull}) {
        mc_options opt;
        opt.permutation_seed = seed;
        auto res = model_check(init_state(sc), opt);
        REQUIRE(std::string(verdict_name(res.v)) == verdict_name(base.v));
        if (auto* a = std::get_if<v_all_rendezvous>(&base.v)) {
            auto& b = std::get<v_all_rendezvous>(res.v);
            REQUIRE(a->states_explored == b.states_explored);
            REQUIRE(a->max_total_traversals == b.max_total_traversals);
        }
    }
}

TEST_CASE("model check: counterexamples replay through the engine") {
    scenario sc = demo_even_ring(6, 2);
    mc_options opt;
    opt.fair = false;
    auto res = model_check(init_state(sc), opt);
    if (auto* ce = std::get_if<v_counterexample>(&res.v)) {
        sim_state s = init_state(sc);
        for (auto& e : ce->events) apply_event(s, e);
        REQUIRE_FALSE(agents_gathered(s));
    }
}

TEST_CASE("model check: bound exhaustion is reported, never silent") {
    auto sc = oriented(6, {1, 3, 5}, 0);
    mc_options opt;
    opt.max_states = 50;
    auto res = model_check(init_state(sc), opt);
    REQUIRE(std::holds_alternative<v_bound_exhausted>(res.v));
}
