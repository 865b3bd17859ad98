#include <catch2/catch_amalgamated.hpp>

#include "rva/protocol.hpp"

using namespace rva;

namespace {

std::array<bool, two_hop_slot_count> view(std::initializer_list<int> occupied_slots) {
    std::array<bool, two_hop_slot_count> v{};
    for (int s : occupied_slots) v[s] = true;
    return v;
}

}  // namespace

TEST_CASE("classify_view: spec cases") {
    // only E occupied -> East
    REQUIRE(classify_view(view({slot_e})) == mesh_dir::east);
    // E, S, SE occupied; N, W free -> East
    REQUIRE(classify_view(view({slot_e, slot_s, slot_se})) == mesh_dir::east);
    // E, S occupied, SE free -> Stay
    REQUIRE_FALSE(classify_view(view({slot_e, slot_s})).has_value());
    // only S occupied -> South
    REQUIRE(classify_view(view({slot_s})) == mesh_dir::south);
    // only W occupied, second ring free -> Stay (two-nodes-in-a-row case)
    REQUIRE_FALSE(classify_view(view({slot_w})).has_value());
    // only W occupied with WW -> West
    REQUIRE(classify_view(view({slot_w, slot_ww})) == mesh_dir::west);
    REQUIRE(classify_view(view({slot_w, slot_nw})) == mesh_dir::west);
    REQUIRE(classify_view(view({slot_w, slot_sw})) == mesh_dir::west);
    // W, S occupied; N, E free -> West
    REQUIRE(classify_view(view({slot_w, slot_s})) == mesh_dir::west);
    // only N occupied, second ring free -> Stay; with support -> North
    REQUIRE_FALSE(classify_view(view({slot_n})).has_value());
    REQUIRE(classify_view(view({slot_n, slot_nn})) == mesh_dir::north);
    REQUIRE(classify_view(view({slot_n, slot_ne})) == mesh_dir::north);
    // all four neighbors occupied -> never moves
    REQUIRE_FALSE(classify_view(view({slot_n, slot_s, slot_e, slot_w})).has_value());
}

TEST_CASE("classify_view: every commanded move targets an occupied cell") {
    for (uint32_t mask = 0; mask < (1u << two_hop_slot_count); ++mask) {
        std::array<bool, two_hop_slot_count> v{};
        for (int i = 0; i < two_hop_slot_count; ++i) v[i] = (mask >> i) & 1;
        auto d = classify_view(v);
        if (!d) continue;
        switch (*d) {
            case mesh_dir::north: REQUIRE(v[slot_n]); break;
            case mesh_dir::south: REQUIRE(v[slot_s]); break;
            case mesh_dir::east: REQUIRE(v[slot_e]); break;
            case mesh_dir::west: REQUIRE(v[slot_w]); break;
        }
    }
}

TEST_CASE("rvmesh transition clears the latch and emits the classified move") {
    mesh_obs o;
    o.occupancy = view({slot_e, slot_s, slot_se});
    auto [n, a] = rvmesh_transition(rvmesh_state{}, o);
    REQUIRE_FALSE(n.swap_latch.has_value());
    REQUIRE(std::get<act_move_mesh>(a).dir == mesh_dir::east);

    // latched East, classified East: the latch only vetoes the inverse swap
    auto [n2, a2] = rvmesh_transition(rvmesh_state{mesh_dir::east}, o);
    REQUIRE(std::get<act_move_mesh>(a2).dir == mesh_dir::east);
    REQUIRE_FALSE(n2.swap_latch.has_value());

    // latched East, classified West: still moves (merging onto the swap
    // partner's node) but may not re-swap simultaneously
    mesh_obs ow;
    ow.occupancy = view({slot_w, slot_s});
    auto [n3, a3] = rvmesh_transition(rvmesh_state{mesh_dir::east}, ow);
    REQUIRE(std::get<act_move_mesh>(a3).dir == mesh_dir::west);
    REQUIRE(rvmesh_swap_vetoed(rvmesh_state{mesh_dir::east}, mesh_dir::west));
    REQUIRE_FALSE(rvmesh_swap_vetoed(rvmesh_state{mesh_dir::east}, mesh_dir::east));
    REQUIRE_FALSE(rvmesh_swap_vetoed(rvmesh_state{}, mesh_dir::west));
}
