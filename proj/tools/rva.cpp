#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "rva/json_io.hpp"
#include "rva/sweep.hpp"

using namespace rva;

namespace {

uint64_t env_max_states() {
    if (const char* v = std::getenv("RVA_MAX_STATES")) return std::strtoull(v, nullptr, 10);
    return 2000000;
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path, int64_t max_events,
            int64_t seed) {
    scenario sc;
    try {
        sc = load_scenario(scenario_path);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (max_events > 0) sc.limits.max_events = static_cast<uint64_t>(max_events);
    if (seed >= 0) sc.policy.seed = static_cast<uint64_t>(seed);
    try {
        auto s0 = init_state(sc);
        auto policy = make_policy(sc, s0);
        auto rr = run(s0, *policy, sc.limits);
        if (!trace_path.empty()) write_trace_jsonl(trace_path, rr.trace);
        json report;
        report["verdict"] = verdict_to_json(rr.v);
        report["events"] = rr.trace.size();
        report["seed"] = sc.policy.seed;
        report["policy"] = sc.policy.kind;
        if (auto* r = std::get_if<v_rendezvous>(&rr.v)) {
            report["total_traversals"] = r->total_traversals;
            report["per_agent_traversals"] = r->per_agent_traversals;
        }
        std::cout << report.dump(2) << "\n";
        if (std::holds_alternative<v_rendezvous>(rr.v)) return 0;
        if (std::holds_alternative<v_livelock>(rr.v)) return 2;
        if (std::holds_alternative<v_bound_exhausted>(rr.v)) return 3;
        return 2;  // counterexample: a non-gathering outcome
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int check_single(const scenario& sc, uint64_t max_states) {
    mc_options opt;
    opt.max_states = max_states;
    opt.fair = sc.fair;
    mc_hooks hooks;
    const mc_hooks* hp = nullptr;
    if (sc.proto == protocol_kind::rv_or) {
        hooks = rvor_lemma_hooks();
        hp = &hooks;
    } else if (sc.proto == protocol_kind::rv_mesh) {
        hooks = rvmesh_invariant_hooks();
        hp = &hooks;
    }
    auto res = model_check(init_state(sc), opt, hp);
    json report;
    report["verdict"] = verdict_to_json(res.v);
    report["states"] = res.states;
    report["edges"] = res.edges;
    report["violations"] = res.violations;
    std::cout << report.dump(2) << "\n";
    if (std::holds_alternative<v_all_rendezvous>(res.v) && res.violations == 0) return 0;
    if (std::holds_alternative<v_bound_exhausted>(res.v)) return 3;
    return 2;
}

int cmd_check(const std::string& path, int64_t max_states_flag, unsigned threads) {
    json j;
    try {
        std::ifstream in(path);
        if (!in) throw error(errc::parse_error, "cannot open: " + path);
        in >> j;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    uint64_t max_states = max_states_flag > 0 ? static_cast<uint64_t>(max_states_flag) : env_max_states();
    try {
        if (j.contains("topology")) return check_single(scenario_from_json(j), max_states);

        // A parameter sweep.
        std::string proto = j.at("protocol").get<std::string>();
        std::string expect = j.value("expect", "rendezvous");
        bool fair = j.value("fairness", "fair") != "adversary-controlled";
        std::vector<sweep_job> jobs;
        std::function<mc_hooks()> hooks;
        if (proto == "rv-or") {
            jobs = rvor_jobs(j.at("n").get<std::vector<int>>(), j.at("k").get<std::vector<int>>(),
                             j.value("special", 0));
            hooks = rvor_lemma_hooks;
        } else if (proto == "rv-ur") {
            jobs = rvur_jobs(j.at("n").get<std::vector<int>>(), j.at("k").get<std::vector<int>>(),
                             j.value("special", 0));
        } else if (proto == "rv-mesh") {
            std::vector<std::pair<int, int>> dims;
            for (auto& d : j.at("dims")) dims.emplace_back(d[0].get<int>(), d[1].get<int>());
            jobs = rvmesh_jobs(dims);
            hooks = rvmesh_invariant_hooks;
        } else {
            throw error(errc::parse_error, "unknown protocol: " + proto);
        }
        for (auto& job : jobs) job.sc.fair = fair;
        mc_options opt;
        opt.max_states = max_states;
        opt.fair = fair;
        auto report = run_sweep(std::move(jobs), opt, hooks, threads);

        bool ok = true;
        json cells = json::array();
        for (auto& [key, c] : report.cells) {
            bool cell_ok;
            if (expect == "rendezvous")
                cell_ok = c.all_rendezvous == c.scenarios && !c.divergence && c.violations == 0;
            else
                cell_ok = c.livelocks + c.counterexamples == c.scenarios;
            ok = ok && cell_ok;
            cells.push_back({{"n", key.n},
                             {"k", key.k},
                             {"scenarios", c.scenarios},
                             {"all_schedules_rendezvous", c.all_rendezvous},
                             {"livelocks", c.livelocks},
                             {"counterexamples", c.counterexamples},
                             {"bound_exhausted", c.bound_exhausted},
                             {"violations", c.violations},
                             {"max_total_traversals", c.max_total_traversals},
                             {"max_per_agent_traversals", c.max_per_agent_traversals},
                             {"max_states", c.max_states},
                             {"ok", cell_ok}});
        }
        json out;
        out["protocol"] = proto;
        out["expect"] = expect;
        out["cells"] = cells;
        out["scenarios"] = report.scenarios;
        out["ok"] = ok;
        std::cout << out.dump(2) << "\n";
        return ok ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

bool certificate_valid(const analysis_demo& d, const cut_certificate& cert) {
    static_config final_cfg(d.topo, d.occupied_steps.back());
    return certificate_disconnects(final_cfg, cert);
}

int cmd_demo(const std::string& name) {
    try {
        if (name == "even-ring") {
            scenario sc = demo_even_ring(8, 2);
            auto s0 = init_state(sc);
            symmetric_ring_policy pol(s0);
            auto rr = run(s0, pol, {100000, 100000});
            json out;
            out["demo"] = name;
            out["scenario"] = scenario_to_json(sc);
            out["verdict"] = verdict_to_json(rr.v);
            std::cout << out.dump(2) << "\n";
            return std::holds_alternative<v_livelock>(rr.v) ? 0 : 2;
        }
        analysis_demo d;
        if (name == "gamma")
            d = demo_gamma();
        else if (name == "hole")
            d = demo_hole();
        else if (name == "disconnected")
            d = demo_disconnected();
        else if (name == "two-cut")
            d = demo_two_cut();
        else {
            std::cerr << "error: unknown demo '" << name
                      << "' (try gamma, hole, disconnected, two-cut, even-ring)\n";
            return 1;
        }
        auto h = demo_history(d);
        auto cert = is_separating(h);
        json out;
        out["demo"] = name;
        out["topology"] = topology_to_json(d.topo);
        json steps = json::array();
        for (auto& occ : d.occupied_steps) steps.push_back(occ);
        out["occupied_steps"] = steps;
        out["separating"] = cert.has_value();
        if (cert) {
            out["certificate"] = cut_certificate_to_json(*cert);
            out["certificate_valid"] = certificate_valid(d, *cert);
        }
        std::cout << out.dump(2) << "\n";
        return cert && certificate_valid(d, *cert) ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_rules() {
    std::cout << mesh_rule_table_json().dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rendezvous-with-a-blocking-adversary simulator and bounded verifier"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, sweep_path, demo_name;
    int64_t max_events = -1, seed = -1, max_states = -1;
    unsigned threads = std::thread::hardware_concurrency();

    auto* run_cmd = app.add_subcommand("run", "execute one scenario under its scheduler policy");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--trace", trace_path, "write a JSONL trace here");
    run_cmd->add_option("--max-events", max_events, "event budget");
    run_cmd->add_option("--seed", seed, "override the policy seed");

    auto* check_cmd = app.add_subcommand("check", "model-check a scenario or a sweep file");
    check_cmd->add_option("spec", sweep_path, "scenario or sweep JSON file")->required();
    check_cmd->add_option("--max-states", max_states, "visited-state budget (default RVA_MAX_STATES)");
    check_cmd->add_option("--threads", threads, "worker threads for sweeps");

    auto* demo_cmd = app.add_subcommand("demo", "run a canned impossibility demonstration");
    demo_cmd->add_option("name", demo_name, "gamma | hole | disconnected | two-cut | even-ring")
        ->required();

    auto* rules_cmd = app.add_subcommand("rules", "print the mesh move-rule table as JSON");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return cmd_run(scenario_path, trace_path, max_events, seed);
    if (check_cmd->parsed()) return cmd_check(sweep_path, max_states, threads);
    if (demo_cmd->parsed()) return cmd_demo(demo_name);
    if (rules_cmd->parsed()) return cmd_rules();
    return 1;
}
