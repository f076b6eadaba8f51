#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace causalsel {

enum class EdgeMark { Directed, Undirected };

struct Edge {
    std::string from;  // for Undirected: the smaller-index endpoint
    std::string to;
    EdgeMark mark = EdgeMark::Undirected;
};

/// Separating sets recorded during skeleton search, keyed by the
/// normalized (min,max) index pair of the removed edge.
using SepsetMap = std::map<std::pair<int, int>, std::vector<int>>;

/// Graph with directed and undirected edge marks over a fixed node set.
/// At most one edge per unordered pair, no self-loops. Used for
/// skeletons, CPDAGs and DAGs.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<std::string> node_names);

    static MixedGraph complete_undirected(std::vector<std::string> node_names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& node_names() const { return names_; }
    bool has_node(const std::string& name) const;
    int index_of(const std::string& name) const;  // throws UnknownNode

    /// Node indices ordered by node name; the canonical iteration order
    /// for deterministic algorithms.
    const std::vector<int>& sorted_indices() const { return sorted_; }

    void add_directed(int from, int to);
    void add_undirected(int a, int b);
    void add_directed(const std::string& from, const std::string& to);
    void add_undirected(const std::string& a, const std::string& b);
    void remove_edge(int a, int b);
    /// Replace whatever mark the pair currently carries.
    void set_directed(int from, int to);
    void set_undirected(int a, int b);

    bool has_edge(int a, int b) const;                 // any mark
    bool has_directed(int from, int to) const;         // from -> to
    bool has_undirected(int a, int b) const;
    bool has_edge(const std::string& a, const std::string& b) const;
    bool has_directed(const std::string& from, const std::string& to) const;
    bool has_undirected(const std::string& a, const std::string& b) const;

    std::vector<int> adjacent(int v) const;            // any mark, name-sorted
    std::vector<int> parents(int v) const;             // u with u -> v
    std::vector<int> children(int v) const;            // u with v -> u
    std::vector<int> undirected_neighbors(int v) const;
    std::set<std::string> adjacent(const std::string& v) const;

    int edge_count() const;
    std::vector<Edge> edges() const;                   // deterministic order

    bool all_edges_directed() const;
    /// True iff the directed-mark subgraph has no directed cycle.
    bool is_acyclic() const;
    /// Directed path from -> ... -> to using directed marks only.
    bool has_directed_path(int from, int to) const;

    bool operator==(const MixedGraph& other) const;

private:
    enum class PairState : unsigned char { None, LowHigh, HighLow, Undirected };
    PairState& state(int a, int b);
    PairState state(int a, int b) const;
    void check_node(int v) const;

    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<int> sorted_;
    std::vector<PairState> pair_;  // upper-triangular storage
};

/// Result of collider orientation; conflicted edges stay undirected.
struct VStructureResult {
    MixedGraph graph;
    std::vector<std::pair<std::string, std::string>> conflicts;
};

/// Orients a -> c <- b for every unshielded triple a-c-b whose separating
/// set does not contain c. The skeleton must be all-undirected.
VStructureResult orient_v_structures(const MixedGraph& skeleton, const SepsetMap& sepsets);

/// Applies Meek rules 1-4 to a fixpoint. Existing directed edges are
/// preserved; no orientation that closes a directed cycle is applied.
MixedGraph apply_meek_rules(const MixedGraph& g);

/// CPDAG of a DAG: v-structure edges keep their direction, the Meek
/// closure is applied, every other edge becomes undirected.
MixedGraph cpdag_of(const MixedGraph& dag);

/// Consistent DAG extension of a partially directed acyclic graph:
/// orients every undirected edge without reversing a directed one or
/// creating a cycle or new v-structure. Throws InvalidArgument when no
/// extension exists.
MixedGraph pdag_to_dag(const MixedGraph& pdag);

struct StructuralDiff {
    int shd = 0;
    std::vector<std::pair<std::string, std::string>> missing_edges;
    std::vector<std::pair<std::string, std::string>> extra_edges;
    std::vector<std::pair<std::string, std::string>> misoriented_edges;
};

/// Structural Hamming distance of `learned` against the CPDAG of `truth`
/// (truth is converted via cpdag_of when it is a fully directed DAG).
StructuralDiff structural_diff(const MixedGraph& learned, const MixedGraph& truth);

/// d-separation of x and y given `cond` in a DAG, via the moralized
/// ancestral subgraph.
bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& cond);

/// DOT text; undirected edges carry dir=none.
std::string to_dot(const MixedGraph& g);

}  // namespace causalsel
