#include "causalsel/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "causalsel/errors.hpp"

namespace causalsel {

MixedGraph::MixedGraph(std::vector<std::string> node_names) : names_(std::move(node_names)) {
    for (size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw InvalidArgument("empty node name");
        if (!index_.emplace(names_[i], static_cast<int>(i)).second)
            throw InvalidArgument("duplicate node name: " + names_[i]);
    }
    sorted_.resize(names_.size());
    std::iota(sorted_.begin(), sorted_.end(), 0);
    std::sort(sorted_.begin(), sorted_.end(),
              [&](int a, int b) { return names_[a] < names_[b]; });
    const size_t p = names_.size();
    pair_.assign(p * (p - 1) / 2, PairState::None);
}

MixedGraph MixedGraph::complete_undirected(std::vector<std::string> node_names) {
    MixedGraph g(std::move(node_names));
    std::fill(g.pair_.begin(), g.pair_.end(), PairState::Undirected);
    return g;
}

bool MixedGraph::has_node(const std::string& name) const { return index_.count(name) > 0; }

int MixedGraph::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownNode(name);
    return it->second;
}

void MixedGraph::check_node(int v) const {
    if (v < 0 || v >= size()) throw InvalidArgument("node index out of range");
}

MixedGraph::PairState& MixedGraph::state(int a, int b) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    const size_t p = names_.size();
    return pair_[static_cast<size_t>(lo) * p - static_cast<size_t>(lo) * (lo + 1) / 2 +
                 static_cast<size_t>(hi - lo - 1)];
}

MixedGraph::PairState MixedGraph::state(int a, int b) const {
    return const_cast<MixedGraph*>(this)->state(a, b);
}

void MixedGraph::add_directed(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw InvalidArgument("self-loop: " + names_[from]);
    if (state(from, to) != PairState::None)
        throw InvalidArgument("pair already has an edge: " + names_[from] + ", " + names_[to]);
    state(from, to) = from < to ? PairState::LowHigh : PairState::HighLow;
}

void MixedGraph::add_undirected(int a, int b) {
    check_node(a);
    check_node(b);
    if (a == b) throw InvalidArgument("self-loop: " + names_[a]);
    if (state(a, b) != PairState::None)
        throw InvalidArgument("pair already has an edge: " + names_[a] + ", " + names_[b]);
    state(a, b) = PairState::Undirected;
}

void MixedGraph::add_directed(const std::string& from, const std::string& to) {
    add_directed(index_of(from), index_of(to));
}

void MixedGraph::add_undirected(const std::string& a, const std::string& b) {
    add_undirected(index_of(a), index_of(b));
}

void MixedGraph::remove_edge(int a, int b) {
    check_node(a);
    check_node(b);
    if (a == b) throw InvalidArgument("self-loop");
    state(a, b) = PairState::None;
}

void MixedGraph::set_directed(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw InvalidArgument("self-loop");
    state(from, to) = from < to ? PairState::LowHigh : PairState::HighLow;
}

void MixedGraph::set_undirected(int a, int b) {
    check_node(a);
    check_node(b);
    if (a == b) throw InvalidArgument("self-loop");
    state(a, b) = PairState::Undirected;
}

bool MixedGraph::has_edge(int a, int b) const {
    check_node(a);
    check_node(b);
    if (a == b) return false;
    return state(a, b) != PairState::None;
}

bool MixedGraph::has_directed(int from, int to) const {
    check_node(from);
    check_node(to);
    if (from == to) return false;
    const PairState s = state(from, to);
    return from < to ? s == PairState::LowHigh : s == PairState::HighLow;
}

bool MixedGraph::has_undirected(int a, int b) const {
    check_node(a);
    check_node(b);
    if (a == b) return false;
    return state(a, b) == PairState::Undirected;
}

bool MixedGraph::has_edge(const std::string& a, const std::string& b) const {
    return has_edge(index_of(a), index_of(b));
}

bool MixedGraph::has_directed(const std::string& from, const std::string& to) const {
    return has_directed(index_of(from), index_of(to));
}

bool MixedGraph::has_undirected(const std::string& a, const std::string& b) const {
    return has_undirected(index_of(a), index_of(b));
}

std::vector<int> MixedGraph::adjacent(int v) const {
    check_node(v);
    std::vector<int> out;
    for (int u : sorted_)
        if (u != v && state(u, v) != PairState::None) out.push_back(u);
    return out;
}

std::vector<int> MixedGraph::parents(int v) const {
    check_node(v);
    std::vector<int> out;
    for (int u : sorted_)
        if (u != v && has_directed(u, v)) out.push_back(u);
    return out;
}

std::vector<int> MixedGraph::children(int v) const {
    check_node(v);
    std::vector<int> out;
    for (int u : sorted_)
        if (u != v && has_directed(v, u)) out.push_back(u);
    return out;
}

std::vector<int> MixedGraph::undirected_neighbors(int v) const {
    check_node(v);
    std::vector<int> out;
    for (int u : sorted_)
        if (u != v && state(u, v) == PairState::Undirected) out.push_back(u);
    return out;
}

std::set<std::string> MixedGraph::adjacent(const std::string& v) const {
    std::set<std::string> out;
    for (int u : adjacent(index_of(v))) out.insert(names_[u]);
    return out;
}

int MixedGraph::edge_count() const {
    int c = 0;
    for (PairState s : pair_)
        if (s != PairState::None) ++c;
    return c;
}

std::vector<Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < size(); ++a) {
        for (int b = a + 1; b < size(); ++b) {
            const PairState s = state(a, b);
            if (s == PairState::None) continue;
            const bool a_first = names_[a] < names_[b];
            if (s == PairState::Undirected) {
                out.push_back(a_first ? Edge{names_[a], names_[b], EdgeMark::Undirected}
                                      : Edge{names_[b], names_[a], EdgeMark::Undirected});
            } else if (has_directed(a, b)) {
                out.push_back({names_[a], names_[b], EdgeMark::Directed});
            } else {
                out.push_back({names_[b], names_[a], EdgeMark::Directed});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });
    return out;
}

bool MixedGraph::all_edges_directed() const {
    return std::none_of(pair_.begin(), pair_.end(),
                        [](PairState s) { return s == PairState::Undirected; });
}

bool MixedGraph::is_acyclic() const {
    const int p = size();
    std::vector<int> indeg(p, 0);
    for (int v = 0; v < p; ++v)
        for (int u = 0; u < p; ++u)
            if (u != v && has_directed(u, v)) ++indeg[v];
    std::vector<int> queue;
    for (int v = 0; v < p; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    int seen = 0;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        ++seen;
        for (int u = 0; u < p; ++u)
            if (u != v && has_directed(v, u) && --indeg[u] == 0) queue.push_back(u);
    }
    return seen == p;
}

bool MixedGraph::has_directed_path(int from, int to) const {
    check_node(from);
    check_node(to);
    if (from == to) return true;
    std::vector<bool> visited(size(), false);
    std::vector<int> stack{from};
    visited[from] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < size(); ++u) {
            if (u == v || !has_directed(v, u) || visited[u]) continue;
            if (u == to) return true;
            visited[u] = true;
            stack.push_back(u);
        }
    }
    return false;
}

bool MixedGraph::operator==(const MixedGraph& other) const {
    return names_ == other.names_ && pair_ == other.pair_;
}

VStructureResult orient_v_structures(const MixedGraph& skeleton, const SepsetMap& sepsets) {
    for (const Edge& e : skeleton.edges())
        if (e.mark != EdgeMark::Undirected)
            throw InvalidArgument("orient_v_structures expects an all-undirected skeleton");

    // Collect collider demands first, then apply; opposing demands on one
    // edge leave it undirected and are reported as conflicts.
    std::map<std::pair<int, int>, std::set<std::pair<int, int>>> demands;  // pair -> directions
    const auto& names = skeleton.node_names();
    for (int c : skeleton.sorted_indices()) {
        const std::vector<int> adj = skeleton.adjacent(c);
        for (size_t ai = 0; ai < adj.size(); ++ai) {
            for (size_t bi = ai + 1; bi < adj.size(); ++bi) {
                const int a = adj[ai], b = adj[bi];
                if (skeleton.has_edge(a, b)) continue;  // shielded
                const auto key = std::minmax(a, b);
                auto it = sepsets.find({key.first, key.second});
                if (it == sepsets.end()) throw MissingSepset(names[a], names[b]);
                const auto& sep = it->second;
                if (std::find(sep.begin(), sep.end(), c) != sep.end()) continue;
                demands[{std::min(a, c), std::max(a, c)}].insert({a, c});
                demands[{std::min(b, c), std::max(b, c)}].insert({b, c});
            }
        }
    }

    VStructureResult res{skeleton, {}};
    for (const auto& [key, dirs] : demands) {
        if (dirs.size() > 1) {
            res.conflicts.emplace_back(names[key.first], names[key.second]);
        } else {
            const auto [from, to] = *dirs.begin();
            res.graph.set_directed(from, to);
        }
    }
    return res;
}

namespace {

// True when orienting x -> y is sound under one of Meek's four rules.
bool meek_fires(const MixedGraph& g, int x, int y) {
    const int p = g.size();
    // R1: z -> x, z and y nonadjacent.
    for (int z = 0; z < p; ++z)
        if (z != x && z != y && g.has_directed(z, x) && !g.has_edge(z, y)) return true;
    // R2: x -> z -> y.
    for (int z = 0; z < p; ++z)
        if (z != x && z != y && g.has_directed(x, z) && g.has_directed(z, y)) return true;
    // R3: x - z, x - w, z -> y, w -> y, z and w nonadjacent.
    for (int z = 0; z < p; ++z) {
        if (z == x || z == y || !g.has_undirected(x, z) || !g.has_directed(z, y)) continue;
        for (int w = z + 1; w < p; ++w) {
            if (w == x || w == y || !g.has_undirected(x, w) || !g.has_directed(w, y)) continue;
            if (!g.has_edge(z, w)) return true;
        }
    }
    // R4: x - z, z -> w, w -> y, z and y nonadjacent.
    for (int z = 0; z < p; ++z) {
        if (z == x || z == y || !g.has_undirected(x, z) || g.has_edge(z, y)) continue;
        for (int w = 0; w < p; ++w)
            if (w != x && w != y && w != z && g.has_directed(z, w) && g.has_directed(w, y))
                return true;
    }
    return false;
}

}  // namespace

MixedGraph apply_meek_rules(const MixedGraph& g) {
    if (!g.is_acyclic()) throw InvalidArgument("apply_meek_rules: directed part has a cycle");
    MixedGraph out = g;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a : out.sorted_indices()) {
            for (int b : out.sorted_indices()) {
                if (a == b || !out.has_undirected(a, b)) continue;
                if (!meek_fires(out, a, b)) continue;
                if (out.has_directed_path(b, a)) continue;  // would close a cycle
                out.set_directed(a, b);
                changed = true;
            }
        }
    }
    return out;
}

MixedGraph cpdag_of(const MixedGraph& dag) {
    if (!dag.all_edges_directed() || !dag.is_acyclic())
        throw NotADag("cpdag_of expects a fully directed acyclic graph");

    MixedGraph pattern(dag.node_names());
    for (const Edge& e : dag.edges()) pattern.add_undirected(e.from, e.to);

    // Keep exactly the v-structure orientations, then close under Meek.
    const int p = dag.size();
    for (int c = 0; c < p; ++c) {
        const std::vector<int> par = dag.parents(c);
        for (size_t i = 0; i < par.size(); ++i)
            for (size_t j = i + 1; j < par.size(); ++j)
                if (!dag.has_edge(par[i], par[j])) {
                    pattern.set_directed(par[i], c);
                    pattern.set_directed(par[j], c);
                }
    }
    return apply_meek_rules(pattern);
}

MixedGraph pdag_to_dag(const MixedGraph& pdag) {
    if (!pdag.is_acyclic()) throw InvalidArgument("pdag_to_dag: directed part has a cycle");
    const int p = pdag.size();
    MixedGraph out = pdag;
    MixedGraph work = pdag;  // shrinking copy; removed nodes lose their edges
    std::vector<bool> active(p, true);
    int remaining = p;

    while (remaining > 0) {
        int found = -1;
        for (int x : work.sorted_indices()) {
            if (!active[x]) continue;
            if (!work.children(x).empty()) continue;  // must be a directed sink
            // Every undirected neighbor of x must be adjacent to every
            // other vertex adjacent to x.
            const std::vector<int> adj = work.adjacent(x);
            bool ok = true;
            for (int u : work.undirected_neighbors(x)) {
                for (int v : adj) {
                    if (v == u || work.has_edge(u, v)) continue;
                    ok = false;
                    break;
                }
                if (!ok) break;
            }
            if (ok) {
                found = x;
                break;
            }
        }
        if (found < 0) throw InvalidArgument("pdag_to_dag: no consistent extension");
        for (int u : work.undirected_neighbors(found)) out.set_directed(u, found);
        for (int u : work.adjacent(found)) work.remove_edge(u, found);
        active[found] = false;
        --remaining;
    }
    if (!out.all_edges_directed() || !out.is_acyclic())
        throw InvalidArgument("pdag_to_dag: extension failed");
    return out;
}

StructuralDiff structural_diff(const MixedGraph& learned, const MixedGraph& truth) {
    std::vector<std::string> ln = learned.node_names(), tn = truth.node_names();
    std::sort(ln.begin(), ln.end());
    std::sort(tn.begin(), tn.end());
    if (ln != tn) throw NodeSetMismatch("structural_diff: node sets differ");

    const MixedGraph ref =
        (truth.all_edges_directed() && truth.is_acyclic() && truth.edge_count() > 0)
            ? cpdag_of(truth)
            : truth;

    StructuralDiff diff;
    enum class Mark { None, Fwd, Bwd, Und };
    auto mark = [](const MixedGraph& g, int a, int b) {
        if (!g.has_edge(a, b)) return Mark::None;
        if (g.has_undirected(a, b)) return Mark::Und;
        return g.has_directed(a, b) ? Mark::Fwd : Mark::Bwd;
    };
    const auto& names = learned.node_names();
    for (int a = 0; a < learned.size(); ++a) {
        for (int b = a + 1; b < learned.size(); ++b) {
            const int ta = ref.index_of(names[a]);
            const int tb = ref.index_of(names[b]);
            const Mark ml = mark(learned, a, b);
            const Mark mt = mark(ref, ta, tb);
            if (ml == mt) continue;
            if (ml == Mark::None)
                diff.missing_edges.emplace_back(names[a], names[b]);
            else if (mt == Mark::None)
                diff.extra_edges.emplace_back(names[a], names[b]);
            else
                diff.misoriented_edges.emplace_back(names[a], names[b]);
        }
    }
    diff.shd = static_cast<int>(diff.missing_edges.size() + diff.extra_edges.size() +
                                diff.misoriented_edges.size());
    return diff;
}

bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& cond) {
    if (!dag.all_edges_directed() || !dag.is_acyclic())
        throw NotADag("d_separated expects a DAG");
    if (x == y) return false;

    const int p = dag.size();
    std::vector<bool> in_cond(p, false);
    for (int s : cond) in_cond[s] = true;
    if (in_cond[x] || in_cond[y])
        throw InvalidArgument("d_separated: conditioning set contains an endpoint");

    // Ancestors of {x, y} union cond.
    std::vector<bool> anc(p, false);
    std::vector<int> stack{x, y};
    for (int s : cond) stack.push_back(s);
    for (int v : stack) anc[v] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < p; ++u)
            if (u != v && dag.has_directed(u, v) && !anc[u]) {
                anc[u] = true;
                stack.push_back(u);
            }
    }

    // Moralized ancestral graph, then connectivity avoiding cond.
    std::vector<std::vector<bool>> adj(p, std::vector<bool>(p, false));
    for (int v = 0; v < p; ++v) {
        if (!anc[v]) continue;
        std::vector<int> par;
        for (int u = 0; u < p; ++u)
            if (u != v && anc[u] && dag.has_directed(u, v)) par.push_back(u);
        for (int u : par) adj[u][v] = adj[v][u] = true;
        for (size_t i = 0; i < par.size(); ++i)
            for (size_t j = i + 1; j < par.size(); ++j)
                adj[par[i]][par[j]] = adj[par[j]][par[i]] = true;
    }

    std::vector<bool> visited(p, false);
    stack = {x};
    visited[x] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < p; ++u) {
            if (!adj[v][u] || visited[u] || in_cond[u]) continue;
            if (u == y) return false;
            visited[u] = true;
            stack.push_back(u);
        }
    }
    return true;
}

std::string to_dot(const MixedGraph& g) {
    std::ostringstream out;
    out << "digraph g {\n";
    std::vector<std::string> names = g.node_names();
    std::sort(names.begin(), names.end());
    for (const auto& name : names) out << "  \"" << name << "\";\n";
    for (const Edge& e : g.edges()) {
        out << "  \"" << e.from << "\" -> \"" << e.to << "\"";
        if (e.mark == EdgeMark::Undirected) out << " [dir=none]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace causalsel
