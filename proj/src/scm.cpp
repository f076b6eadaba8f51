#include "causalsel/scm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "causalsel/errors.hpp"

namespace causalsel {

void ScmSpec::validate() const {
    if (!dag.all_edges_directed() || !dag.is_acyclic())
        throw InvalidArgument("ScmSpec: graph must be a DAG");
    size_t edge_total = 0;
    for (const Edge& e : dag.edges()) {
        ++edge_total;
        if (!coefficients.count({e.from, e.to}))
            throw InvalidArgument("ScmSpec: missing coefficient for " + e.from + " -> " + e.to);
    }
    if (coefficients.size() != edge_total)
        throw InvalidArgument("ScmSpec: coefficient for a non-edge present");
    for (const auto& name : dag.node_names()) {
        auto it = noise_std.find(name);
        if (it == noise_std.end() || it->second <= 0.0)
            throw InvalidArgument("ScmSpec: node " + name + " needs a positive noise std");
    }
    for (const auto& [name, thr] : binarize) {
        (void)thr;
        if (!dag.has_node(name)) throw UnknownNode(name);
    }
}

MixedGraph random_dag(int p, double edge_prob, std::uint64_t seed) {
    if (p < 1) throw InvalidArgument("random_dag: p must be >= 1");
    if (edge_prob < 0.0 || edge_prob > 1.0)
        throw InvalidArgument("random_dag: edge_prob must be in [0,1]");
    std::vector<std::string> names;
    names.reserve(p);
    for (int i = 0; i < p; ++i) names.push_back("v" + std::to_string(i));
    MixedGraph g(names);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (unif(rng) < edge_prob) g.add_directed(i, j);
    return g;
}

namespace {

// Topological order, smallest name-sorted index first.
std::vector<int> topo_order(const MixedGraph& dag) {
    const int p = dag.size();
    std::vector<int> indeg(p, 0);
    for (int v = 0; v < p; ++v) indeg[v] = static_cast<int>(dag.parents(v).size());
    std::vector<int> order;
    std::vector<bool> done(p, false);
    while (static_cast<int>(order.size()) < p) {
        bool advanced = false;
        for (int v : dag.sorted_indices()) {
            if (done[v] || indeg[v] != 0) continue;
            done[v] = true;
            order.push_back(v);
            for (int c : dag.children(v)) --indeg[c];
            advanced = true;
            break;
        }
        if (!advanced) throw NotADag("cycle in SCM graph");
    }
    return order;
}

double column_median(Eigen::VectorXd col) {
    std::vector<double> v(col.data(), col.data() + col.size());
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        return (hi + v[mid - 1]) / 2.0;
    }
    return hi;
}

}  // namespace

Dataset sample(const ScmSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("sample: n must be >= 1");
    spec.validate();
    const int p = spec.dag.size();
    const auto& names = spec.dag.node_names();

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, p);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int v : topo_order(spec.dag)) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        for (int u : spec.dag.parents(v))
            col += spec.coefficients.at({names[u], names[v]}) * values.col(u);
        const double sd = spec.noise_std.at(names[v]);
        for (int i = 0; i < n; ++i) col(i) += sd * gauss(rng);
        values.col(v) = col;
    }

    for (int v : spec.dag.sorted_indices()) {
        auto it = spec.binarize.find(names[v]);
        if (it == spec.binarize.end()) continue;
        const double thr = it->second ? *it->second : column_median(values.col(v));
        for (int i = 0; i < n; ++i) values(i, v) = values(i, v) > thr ? 1.0 : 0.0;
    }
    return Dataset(std::move(values), names);
}

Benchmark confounded_benchmark(int n_signal, int n_context, int n_noise,
                               std::uint64_t seed) {
    if (n_signal < 1) throw InvalidArgument("confounded_benchmark: n_signal must be >= 1");
    if (n_context < 0 || n_noise < 0)
        throw InvalidArgument("confounded_benchmark: counts must be >= 0");

    auto padded = [](const char* prefix, int i) {
        std::string num = std::to_string(i);
        while (num.size() < 3) num.insert(num.begin(), '0');
        return std::string(prefix) + num;
    };

    Benchmark bench;
    bench.target = "T";
    std::vector<std::string> names{"T"};
    if (n_context > 0) names.push_back("context");
    for (int i = 0; i < n_signal; ++i) {
        bench.signal_features.push_back(padded("s", i));
        names.push_back(bench.signal_features.back());
    }
    for (int i = 0; i < n_context; ++i) {
        bench.context_features.push_back(padded("c", i));
        names.push_back(bench.context_features.back());
    }
    for (int i = 0; i < n_noise; ++i) {
        bench.noise_features.push_back(padded("x", i));
        names.push_back(bench.noise_features.back());
    }

    ScmSpec spec;
    spec.dag = MixedGraph(names);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto coef = [&](double lo, double hi) {
        const double mag = lo + (hi - lo) * unif(rng);
        return unif(rng) < 0.5 ? -mag : mag;
    };

    for (const auto& name : names) spec.noise_std[name] = 1.0;

    // Target drives the signal features. Signals stay continuous so that
    // they screen off the target from every downstream feature; only the
    // context features are binarized into 0/1 indicator columns.
    for (const auto& s : bench.signal_features) {
        spec.dag.add_directed("T", s);
        spec.coefficients[{"T", s}] = coef(0.6, 1.0);
    }
    // Context features descend from the shared context variable and from
    // signal features: correlated with the signal and (through it) with
    // the target, but carrying no direct target edge.
    for (int j = 0; j < n_context; ++j) {
        const std::string& c = bench.context_features[j];
        spec.dag.add_directed("context", c);
        spec.coefficients[{"context", c}] = coef(0.5, 1.5);
        const std::string& s1 = bench.signal_features[j % n_signal];
        const std::string& s2 = bench.signal_features[(j + 1) % n_signal];
        spec.dag.add_directed(s1, c);
        spec.coefficients[{s1, c}] = coef(0.5, 1.5);
        if (s2 != s1) {
            spec.dag.add_directed(s2, c);
            spec.coefficients[{s2, c}] = coef(0.5, 1.5);
        }
        spec.binarize[c] = std::nullopt;
    }
    // Noise features stay isolated.

    spec.validate();
    bench.spec = std::move(spec);
    return bench;
}

nlohmann::json scm_to_json(const ScmSpec& spec) {
    nlohmann::json j;
    j["nodes"] = spec.dag.node_names();
    j["edges"] = nlohmann::json::array();
    for (const Edge& e : spec.dag.edges()) {
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"coefficient", spec.coefficients.at({e.from, e.to})}});
    }
    j["noise_std"] = spec.noise_std;
    nlohmann::json bin = nlohmann::json::object();
    for (const auto& [name, thr] : spec.binarize) {
        if (thr)
            bin[name] = *thr;
        else
            bin[name] = nullptr;
    }
    j["binarize"] = bin;
    return j;
}

ScmSpec scm_from_json(const nlohmann::json& j) {
    ScmSpec spec;
    spec.dag = MixedGraph(j.at("nodes").get<std::vector<std::string>>());
    for (const auto& e : j.at("edges")) {
        const auto from = e.at("from").get<std::string>();
        const auto to = e.at("to").get<std::string>();
        spec.dag.add_directed(from, to);
        spec.coefficients[{from, to}] = e.at("coefficient").get<double>();
    }
    spec.noise_std = j.at("noise_std").get<std::map<std::string, double>>();
    if (j.contains("binarize")) {
        for (const auto& [name, thr] : j.at("binarize").items()) {
            if (thr.is_null())
                spec.binarize[name] = std::nullopt;
            else
                spec.binarize[name] = thr.get<double>();
        }
    }
    spec.validate();
    return spec;
}

}  // namespace causalsel
