#include "causalsel/pc.hpp"

#include <algorithm>

#include "causalsel/errors.hpp"

namespace causalsel {

FisherZOracle::FisherZOracle(const Dataset& data, double alpha)
    : corr_(correlation_matrix(data)),
      names_(data.column_names()),
      n_(data.n()),
      alpha_(alpha) {}

CiTestResult FisherZOracle::test(int i, int j, const std::vector<int>& cond) {
    return fisher_z_test(corr_, i, j, cond, n_, alpha_);
}

DSeparationOracle::DSeparationOracle(MixedGraph dag) : dag_(std::move(dag)) {
    if (!dag_.all_edges_directed() || !dag_.is_acyclic())
        throw NotADag("DSeparationOracle expects a DAG");
}

CiTestResult DSeparationOracle::test(int i, int j, const std::vector<int>& cond) {
    CiTestResult res;
    res.cond_size = static_cast<int>(cond.size());
    res.independent = d_separated(dag_, i, j, cond);
    res.p_value = res.independent ? 1.0 : 0.0;
    res.r = res.independent ? 0.0 : 1.0;
    res.z = res.independent ? 0.0 : 1e9;
    return res;
}

const std::vector<std::string>& DSeparationOracle::variable_names() const {
    return dag_.node_names();
}

namespace {

// Enumerates size-k subsets of `pool` in lexicographic order over the
// pool's own ordering; returns false from the visitor to stop early.
bool for_each_subset(const std::vector<int>& pool, int k,
                     const std::function<bool(const std::vector<int>&)>& visit) {
    const int m = static_cast<int>(pool.size());
    if (k > m) return true;
    std::vector<int> pick(k);
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[pick[i]];
        if (!visit(subset)) return false;
        int i = k - 1;
        while (i >= 0 && pick[i] == m - k + i) --i;
        if (i < 0) return true;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

}  // namespace

SkeletonResult pc_skeleton(CiOracle& oracle, const PcConfig& cfg) {
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0)
        throw InvalidArgument("alpha must be in (0,1)");
    if (cfg.max_cond_size && *cfg.max_cond_size < 0)
        throw InvalidArgument("max_cond_size must be >= 0");

    SkeletonResult res{MixedGraph::complete_undirected(oracle.variable_names()), {}, 0};
    MixedGraph& g = res.graph;
    const std::vector<int>& order = g.sorted_indices();

    int level = 0;
    while (true) {
        if (cfg.max_cond_size && level > *cfg.max_cond_size) break;

        // PC-stable: conditioning candidates come from a per-level
        // snapshot; removals touch only the working graph.
        std::vector<std::vector<int>> snapshot(g.size());
        bool any_candidate = false;
        for (int v = 0; v < g.size(); ++v) {
            snapshot[v] = g.adjacent(v);
            if (static_cast<int>(snapshot[v].size()) > level) any_candidate = true;
        }
        if (!any_candidate) break;

        for (int i : order) {
            for (int j : order) {
                if (i == j || !g.has_edge(i, j)) continue;
                std::vector<int> pool;
                pool.reserve(snapshot[i].size());
                for (int u : snapshot[i])
                    if (u != j) pool.push_back(u);
                if (static_cast<int>(pool.size()) < level) continue;

                for_each_subset(pool, level, [&](const std::vector<int>& cond) {
                    ++res.test_count;
                    const CiTestResult t = oracle.test(i, j, cond);
                    if (!t.independent) return true;
                    g.remove_edge(i, j);
                    res.sepsets[{std::min(i, j), std::max(i, j)}] = cond;
                    return false;
                });
            }
        }
        ++level;
    }
    return res;
}

SkeletonResult pc_skeleton(const Dataset& data, const PcConfig& cfg) {
    FisherZOracle oracle(data, cfg.alpha);
    return pc_skeleton(oracle, cfg);
}

PcResult pc_search(CiOracle& oracle, const PcConfig& cfg) {
    SkeletonResult skel = pc_skeleton(oracle, cfg);
    VStructureResult vs = orient_v_structures(skel.graph, skel.sepsets);

    // Collider orientations from noisy tests can disagree across triples
    // and close a directed cycle; treat every edge on such a cycle like a
    // conflict and leave it undirected before the Meek closure.
    if (!vs.graph.is_acyclic()) {
        const std::vector<std::string>& names = vs.graph.node_names();
        std::vector<std::pair<int, int>> cyclic;
        for (int a : vs.graph.sorted_indices())
            for (int b : vs.graph.sorted_indices())
                if (vs.graph.has_directed(a, b) && vs.graph.has_directed_path(b, a))
                    cyclic.emplace_back(a, b);
        for (const auto& [a, b] : cyclic) {
            vs.graph.set_undirected(a, b);
            vs.conflicts.emplace_back(names[a], names[b]);
        }
    }

    PcResult res;
    res.graph = apply_meek_rules(vs.graph);
    res.sepsets = std::move(skel.sepsets);
    res.test_count = skel.test_count;
    res.conflicts = std::move(vs.conflicts);
    return res;
}

PcResult pc_search(const Dataset& data, const PcConfig& cfg) {
    FisherZOracle oracle(data, cfg.alpha);
    return pc_search(oracle, cfg);
}

}  // namespace causalsel
