#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "rva/model_check.hpp"
#include "rva/scenario.hpp"

namespace rva {

struct cell_key {
    int n = 0, k = 0;  // rings: ring size / agents; meshes: rows*100+cols / agents
    bool operator<(const cell_key& o) const { return std::tie(n, k) < std::tie(o.n, o.k); }
};

struct cell_stats {
    uint64_t scenarios = 0;
    uint64_t all_rendezvous = 0;
    uint64_t livelocks = 0;
    uint64_t counterexamples = 0;
    uint64_t bound_exhausted = 0;
    uint64_t violations = 0;
    uint64_t max_total_traversals = 0;
    uint64_t max_per_agent_traversals = 0;
    uint64_t max_states = 0;
    double max_total_over_kn = 0.0;  // per-scenario total / (k*n)
    double max_total_over_k2 = 0.0;  // per-scenario total / (k*k)
    bool divergence = false;
    std::string sample_failure;
};

struct sweep_report {
    std::map<cell_key, cell_stats> cells;
    uint64_t scenarios = 0;

    void merge_result(const cell_key& key, const scenario& sc, const mc_result& res) {
        cell_stats& c = cells[key];
        c.scenarios += 1;
        scenarios += 1;
        c.max_states = std::max(c.max_states, res.states);
        c.violations += res.violations;
        int k = static_cast<int>(sc.placements.size());
        int n = sc.topo.node_count;
        if (auto* a = std::get_if<v_all_rendezvous>(&res.v)) {
            c.all_rendezvous += 1;
            if (a->traversal_divergence) {
                c.divergence = true;
            } else {
                c.max_total_traversals = std::max(c.max_total_traversals, a->max_total_traversals);
                c.max_per_agent_traversals =
                    std::max(c.max_per_agent_traversals, a->max_per_agent_traversals);
                c.max_total_over_kn = std::max(
                    c.max_total_over_kn, static_cast<double>(a->max_total_traversals) / (1.0 * k * n));
                c.max_total_over_k2 = std::max(
                    c.max_total_over_k2, static_cast<double>(a->max_total_traversals) / (1.0 * k * k));
            }
        } else if (std::holds_alternative<v_livelock>(res.v)) {
            c.livelocks += 1;
        } else if (std::holds_alternative<v_counterexample>(res.v)) {
            c.counterexamples += 1;
            if (c.sample_failure.empty())
                c.sample_failure = std::get<v_counterexample>(res.v).reason;
        } else if (std::holds_alternative<v_bound_exhausted>(res.v)) {
            c.bound_exhausted += 1;
        }
    }
};

// ---------------------------------------------------------------------------
// Enumeration helpers

inline void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// All connected hole-free occupied subsets of a rows x cols mesh with >= 2 nodes.
inline std::vector<std::vector<node_id>> connected_holefree_subsets(const topology& t) {
    std::vector<std::vector<node_id>> out;
    int n = t.node_count;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        int bits = __builtin_popcount(mask);
        if (bits < 2) continue;
        std::vector<node_id> occ;
        for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) occ.push_back(v);
        static_config cfg(t, occ);
        if (!occupied_connected(cfg)) continue;
        if (has_holes(cfg)) continue;
        out.push_back(std::move(occ));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel scenario runner

struct sweep_job {
    cell_key key;
    scenario sc;
};

inline sweep_report run_sweep(std::vector<sweep_job> jobs, const mc_options& opt,
                              const std::function<mc_hooks()>& make_hooks = {},
                              unsigned threads = std::thread::hardware_concurrency()) {
    sweep_report report;
    std::mutex mu;
    std::atomic<size_t> next{0};
    if (threads == 0) threads = 1;
    auto worker = [&]() {
        mc_hooks hooks;
        bool have_hooks = false;
        if (make_hooks) {
            hooks = make_hooks();
            have_hooks = true;
        }
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const sweep_job& job = jobs[i];
            auto s0 = init_state(job.sc);
            auto res = model_check(s0, opt, have_hooks ? &hooks : nullptr);
            std::lock_guard<std::mutex> lock(mu);
            report.merge_result(job.key, job.sc, res);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return report;
}

// ---------------------------------------------------------------------------
// Standard sweeps

// Oriented rings: all k-subsets of nodes, all blocker starts.
inline std::vector<sweep_job> rvor_jobs(const std::vector<int>& ns, const std::vector<int>& ks,
                                        int special = 0) {
    std::vector<sweep_job> jobs;
    for (int n : ns) {
        for (int k : ks) {
            if (k >= n) continue;  // the blocker needs a free node
            auto topo = build_oriented_ring(n, special);
            for_each_combination(n, k, [&](const std::vector<int>& placement) {
                for (int m = 0; m < n; ++m) {
                    if (std::find(placement.begin(), placement.end(), m) != placement.end()) continue;
                    sweep_job job;
                    job.key = {n, k};
                    job.sc.topo = topo;
                    job.sc.proto = protocol_kind::rv_or;
                    job.sc.placements.assign(placement.begin(), placement.end());
                    job.sc.malicious = m;
                    jobs.push_back(std::move(job));
                }
            });
        }
    }
    return jobs;
}

// Unoriented rings: placements x chirality assignments x blocker starts.
inline std::vector<sweep_job> rvur_jobs(const std::vector<int>& ns, const std::vector<int>& ks,
                                        int special = 0) {
    std::vector<sweep_job> jobs;
    for (int n : ns) {
        for (int k : ks) {
            if (k >= n) continue;
            auto topo = build_unoriented_ring(n, special);
            for_each_combination(n, k, [&](const std::vector<int>& placement) {
                for (uint32_t chimask = 0; chimask < (1u << k); ++chimask) {
                    for (int m = 0; m < n; ++m) {
                        if (std::find(placement.begin(), placement.end(), m) != placement.end())
                            continue;
                        sweep_job job;
                        job.key = {n, k};
                        job.sc.topo = topo;
                        job.sc.proto = protocol_kind::rv_ur;
                        job.sc.placements.assign(placement.begin(), placement.end());
                        for (int i = 0; i < k; ++i)
                            job.sc.chir.push_back((chimask >> i) & 1 ? chirality::reverse
                                                                     : chirality::forward);
                        job.sc.malicious = m;
                        jobs.push_back(std::move(job));
                    }
                }
            });
        }
    }
    return jobs;
}

// Oriented meshes: all connected hole-free occupied sets, one agent per node,
// all blocker starts (none when the board is full).
inline std::vector<sweep_job> rvmesh_jobs(const std::vector<std::pair<int, int>>& dims) {
    std::vector<sweep_job> jobs;
    for (auto [rows, cols] : dims) {
        auto topo = build_oriented_mesh(rows, cols);
        for (auto& occ : connected_holefree_subsets(topo)) {
            std::vector<int> frees;
            for (node_id v = 0; v < topo.node_count; ++v)
                if (std::find(occ.begin(), occ.end(), v) == occ.end()) frees.push_back(v);
            auto push = [&](int m) {
                sweep_job job;
                job.key = {rows * 100 + cols, static_cast<int>(occ.size())};
                job.sc.topo = topo;
                job.sc.proto = protocol_kind::rv_mesh;
                job.sc.placements = occ;
                job.sc.malicious = m;
                jobs.push_back(std::move(job));
            };
            if (frees.empty())
                push(-1);
            else
                for (int m : frees) push(m);
        }
    }
    return jobs;
}

}  // namespace rva
