#include "causalsel/ges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalsel/errors.hpp"

namespace causalsel {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kConditionLimit = 1e12;
const double kInvalid = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd ml_covariance(const Dataset& data) {
    Eigen::MatrixXd centered = data.values();
    for (int j = 0; j < data.p(); ++j) centered.col(j).array() -= centered.col(j).mean();
    return (centered.transpose() * centered) / data.n();
}

double penalized_value(double sigma2, int k, int n, double c) {
    return -n * std::log(std::max(sigma2, kVarianceFloor)) - c * k * std::log(double(n));
}

// Shared machinery for local scores and score deltas against one ML
// covariance matrix.
class GesScorer {
public:
    GesScorer(Eigen::MatrixXd cov, int n, double c)
        : cov_(std::move(cov)), n_(n), c_(c), p_(static_cast<int>(cov_.rows())) {}

    int p() const { return p_; }

    double residual_variance(int node, const std::vector<int>& parents, bool* ok = nullptr) const {
        if (ok) *ok = true;
        if (parents.empty()) return cov_(node, node);
        const int m = static_cast<int>(parents.size());
        Eigen::MatrixXd cpp(m, m);
        Eigen::VectorXd cpb(m);
        for (int a = 0; a < m; ++a) {
            cpb(a) = cov_(parents[a], node);
            for (int b = 0; b < m; ++b) cpp(a, b) = cov_(parents[a], parents[b]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cpp);
        if (llt.info() != Eigen::Success) {
            if (!ok) throw CollinearParents("collinear parent set");
            *ok = false;
            return 0.0;
        }
        return cov_(node, node) - cpb.dot(llt.solve(cpb));
    }

    double value(int node, const std::vector<int>& parents) const {
        return penalized_value(residual_variance(node, parents),
                               static_cast<int>(parents.size()) + 1, n_, c_);
    }

    // Score deltas for inserting a -> node, for every candidate source a,
    // in one pass. Entries for node itself, current parents, and
    // collinear candidates are -inf.
    Eigen::VectorXd insert_deltas(int node, const std::vector<int>& parents) const {
        Eigen::VectorXd deltas = Eigen::VectorXd::Constant(p_, kInvalid);
        const int m = static_cast<int>(parents.size());
        const double logn = std::log(double(n_));

        double s = 0.0;  // current residual variance
        Eigen::MatrixXd W;  // cov(:,P) * inv(C_PP)
        Eigen::MatrixXd A;  // cov(:,P)
        Eigen::VectorXd cpb;
        if (m > 0) {
            A.resize(p_, m);
            Eigen::MatrixXd cpp(m, m);
            cpb.resize(m);
            for (int t = 0; t < m; ++t) {
                A.col(t) = cov_.col(parents[t]);
                cpb(t) = cov_(parents[t], node);
                for (int u = 0; u < m; ++u) cpp(t, u) = cov_(parents[t], parents[u]);
            }
            Eigen::LLT<Eigen::MatrixXd> llt(cpp);
            if (llt.info() != Eigen::Success) return deltas;
            W = llt.solve(A.transpose()).transpose();
            s = cov_(node, node) - cpb.dot(llt.solve(cpb));
        } else {
            s = cov_(node, node);
        }
        const double s_cl = std::max(s, kVarianceFloor);

        std::vector<bool> in_parents(p_, false);
        for (int t : parents) in_parents[t] = true;
        for (int a = 0; a < p_; ++a) {
            if (a == node || in_parents[a]) continue;
            double va = cov_(a, a);
            double cab = cov_(a, node);
            if (m > 0) {
                const double wa_aa = W.row(a).dot(A.row(a));
                va -= wa_aa;
                cab -= W.row(a).dot(cpb);
            }
            if (va <= kVarianceFloor) continue;  // candidate collinear with parents
            const double s_new = std::max(s - cab * cab / va, kVarianceFloor);
            deltas(a) = -n_ * (std::log(s_new) - std::log(s_cl)) - c_ * logn;
        }
        return deltas;
    }

    // Penalized value with a collinearity flag instead of a throw.
    double value_checked(int node, const std::vector<int>& parents, bool* ok) const {
        const double s = residual_variance(node, parents, ok);
        if (!*ok) return kInvalid;
        return penalized_value(s, static_cast<int>(parents.size()) + 1, n_, c_);
    }

private:
    Eigen::MatrixXd cov_;
    int n_;
    double c_;
    int p_;
};

// Best deletion of the x-y adjacency in a CPDAG, over orientation sets
// H drawn from the undirected neighbors of y that are adjacent to x
// (the deletion may orient y -> h and x -> h for h in H). Conditioning
// follows the equivalence-class delete operator: score y given
// parents(y) plus the neighbors kept out of H, with and without x.
struct DeleteMove {
    double delta = -std::numeric_limits<double>::infinity();
    std::vector<int> h;
};

DeleteMove best_delete(const GesScorer& scorer, const MixedGraph& g, int x, int y) {
    DeleteMove best;
    std::vector<int> na;
    for (int u : g.undirected_neighbors(y))
        if (u != x && g.has_edge(u, x)) na.push_back(u);
    const int nn = static_cast<int>(na.size());

    std::vector<int> base;
    for (int u : g.parents(y))
        if (u != x) base.push_back(u);

    // Exhaustive H enumeration is exponential in |NA|; past a small size
    // keep only the empty set, singletons, and the full set.
    constexpr int kMaxExhaustive = 10;
    for (unsigned mask = 0; mask < (1u << nn); ++mask) {
        if (nn > kMaxExhaustive) {
            const int bits = __builtin_popcount(mask);
            if (bits > 1 && mask != (1u << nn) - 1) continue;
        }
        std::vector<int> rest;  // NA \ H, must be a clique
        for (int t = 0; t < nn; ++t)
            if (!(mask & (1u << t))) rest.push_back(na[t]);
        bool clique = true;
        for (size_t a = 0; a < rest.size() && clique; ++a)
            for (size_t b = a + 1; b < rest.size(); ++b)
                if (!g.has_edge(rest[a], rest[b])) {
                    clique = false;
                    break;
                }
        if (!clique) continue;

        std::vector<int> cond = base;
        cond.insert(cond.end(), rest.begin(), rest.end());
        std::sort(cond.begin(), cond.end());
        cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
        std::vector<int> cond_x = cond;
        cond_x.insert(std::lower_bound(cond_x.begin(), cond_x.end(), x), x);

        bool ok0 = true, ok1 = true;
        const double without = scorer.value_checked(y, cond, &ok0);
        const double with = scorer.value_checked(y, cond_x, &ok1);
        if (!ok0 || !ok1) continue;
        const double delta = without - with;
        if (delta > best.delta) {
            best.delta = delta;
            best.h.clear();
            for (int t = 0; t < nn; ++t)
                if (mask & (1u << t)) best.h.push_back(na[t]);
        }
    }
    return best;
}

void check_config(const GesConfig& cfg) {
    if (cfg.penalty_discount <= 0.0) throw InvalidArgument("penalty_discount must be > 0");
    if (cfg.max_parents && *cfg.max_parents < 0)
        throw InvalidArgument("max_parents must be >= 0");
}

}  // namespace

LocalScore local_score(const Dataset& data, int node, const std::vector<int>& parents,
                       const GesConfig& cfg) {
    check_config(cfg);
    const int n = data.n();
    if (node < 0 || node >= data.p()) throw InvalidArgument("local_score: node out of range");
    for (int t : parents)
        if (t < 0 || t >= data.p() || t == node)
            throw InvalidArgument("local_score: bad parent index");
    if (n <= static_cast<int>(parents.size()) + 1)
        throw InsufficientSamples("local_score: n <= |parents| + 1");

    LocalScore ls;
    ls.node = node;
    ls.parents = parents;
    ls.k = static_cast<int>(parents.size()) + 1;

    // Conditioning check on the parent Gram matrix before scoring.
    if (!parents.empty()) {
        Eigen::MatrixXd centered(data.n(), parents.size());
        for (size_t t = 0; t < parents.size(); ++t) {
            centered.col(static_cast<Eigen::Index>(t)) = data.column(parents[t]);
            centered.col(static_cast<Eigen::Index>(t)).array() -=
                centered.col(static_cast<Eigen::Index>(t)).mean();
        }
        const Eigen::MatrixXd gram = centered.transpose() * centered / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const double lmin = eig.eigenvalues().minCoeff();
        const double lmax = eig.eigenvalues().maxCoeff();
        if (lmin <= 0.0 || lmax / lmin > kConditionLimit)
            throw CollinearParents("collinear parent set for node " +
                                   data.column_names()[node]);
    }

    GesScorer scorer(ml_covariance(data), n, cfg.penalty_discount);
    const double sigma2 = scorer.residual_variance(node, parents);
    ls.degenerate = sigma2 < kVarianceFloor;
    ls.residual_variance = std::max(sigma2, kVarianceFloor);
    ls.value = penalized_value(sigma2, ls.k, n, cfg.penalty_discount);
    return ls;
}

double dag_score(const Dataset& data, const MixedGraph& dag, const GesConfig& cfg) {
    if (!dag.all_edges_directed() || !dag.is_acyclic()) throw NotADag("dag_score expects a DAG");
    check_config(cfg);
    GesScorer scorer(ml_covariance(data), data.n(), cfg.penalty_discount);
    double total = 0.0;
    for (int v = 0; v < dag.size(); ++v) total += scorer.value(v, dag.parents(v));
    return total;
}

GesResult ges_search(const Dataset& data, const GesConfig& cfg) {
    check_config(cfg);
    const int p = data.p();
    const int n = data.n();
    if (n <= 2) throw InsufficientSamples("ges_search: too few rows");

    GesScorer scorer(ml_covariance(data), n, cfg.penalty_discount);
    const std::vector<std::string>& names = data.column_names();

    MixedGraph dag(names);
    std::vector<std::vector<int>> parents(p);
    const std::vector<int>& order = dag.sorted_indices();

    GesResult res;

    // Forward: cached insertion deltas per target, refreshed only for the
    // node whose parent set changed.
    std::vector<Eigen::VectorXd> fwd(p);
    for (int b = 0; b < p; ++b) fwd[b] = scorer.insert_deltas(b, parents[b]);

    while (true) {
        double best = 0.0;
        int best_a = -1, best_b = -1;
        for (int a : order) {
            for (int b : order) {
                if (a == b || dag.has_edge(a, b)) continue;
                const double delta = fwd[b](a);
                if (!(delta > 0.0) || delta <= best) continue;
                if (cfg.max_parents &&
                    static_cast<int>(parents[b].size()) >= *cfg.max_parents)
                    continue;
                if (dag.has_directed_path(b, a)) continue;  // would close a cycle
                best = delta;
                best_a = a;
                best_b = b;
            }
        }
        if (best_a < 0) break;
        dag.add_directed(best_a, best_b);
        parents[best_b].push_back(best_a);
        std::sort(parents[best_b].begin(), parents[best_b].end());
        res.forward_steps.push_back({names[best_a], names[best_b], best});
        fwd[best_b] = scorer.insert_deltas(best_b, parents[best_b]);
    }

    // Backward: greedy adjacency deletions on the equivalence class of
    // the forward result. Working on the CPDAG (with re-completion after
    // every move) lets a deletion implicitly reorient covered edges, so
    // the search can leave orientation choices the forward phase got
    // wrong; plain single-edge deletion on the DAG cannot.
    MixedGraph pattern = cpdag_of(dag);
    Eigen::MatrixXd del = Eigen::MatrixXd::Constant(p, p, kInvalid);
    std::vector<std::vector<int>> del_h(static_cast<size_t>(p) * p);
    auto recompute_pair = [&](int x, int y) {
        if (x == y || !(pattern.has_directed(x, y) || pattern.has_undirected(x, y))) {
            del(x, y) = kInvalid;
            return;
        }
        DeleteMove mv = best_delete(scorer, pattern, x, y);
        del(x, y) = mv.delta;
        del_h[static_cast<size_t>(x) * p + y] = std::move(mv.h);
    };
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y) recompute_pair(x, y);

    while (true) {
        double best = 0.0;
        int best_x = -1, best_y = -1;
        for (int x : order)
            for (int y : order) {
                if (x == y) continue;
                const double delta = del(x, y);
                if (delta > 0.0 && delta > best) {
                    best = delta;
                    best_x = x;
                    best_y = y;
                }
            }
        if (best_x < 0) break;

        MixedGraph next = pattern;
        next.remove_edge(best_x, best_y);
        for (int h : del_h[static_cast<size_t>(best_x) * p + best_y]) {
            next.set_directed(best_y, h);
            if (next.has_undirected(best_x, h)) next.set_directed(best_x, h);
        }
        next = cpdag_of(pdag_to_dag(next));
        res.backward_steps.push_back({names[best_x], names[best_y], best});

        // Deltas depend on parents, undirected neighborhoods and
        // adjacency, so refresh every pair with an endpoint whose
        // incident marks changed during re-completion.
        std::vector<bool> changed(p, false);
        changed[best_x] = changed[best_y] = true;
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) {
                const bool same = pattern.has_directed(a, b) == next.has_directed(a, b) &&
                                  pattern.has_directed(b, a) == next.has_directed(b, a) &&
                                  pattern.has_undirected(a, b) == next.has_undirected(a, b);
                if (!same) changed[a] = changed[b] = true;
            }
        pattern = std::move(next);
        for (int x = 0; x < p; ++x)
            for (int y = 0; y < p; ++y)
                if (changed[x] || changed[y]) recompute_pair(x, y);
    }

    res.graph = pattern;
    res.dag = pdag_to_dag(pattern);
    res.total_score = 0.0;
    for (int v = 0; v < p; ++v) res.total_score += scorer.value(v, res.dag.parents(v));
    return res;
}

}  // namespace causalsel
