#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causalsel/dataset.hpp"
#include "causalsel/graph.hpp"

namespace causalsel {

/// Linear-Gaussian structural equation model over a DAG. Nodes listed in
/// `binarize` are thresholded to {0,1} after sampling; a missing
/// threshold means the column median.
struct ScmSpec {
    MixedGraph dag;  // all edges directed, acyclic
    std::map<std::pair<std::string, std::string>, double> coefficients;  // edge -> weight
    std::map<std::string, double> noise_std;
    std::map<std::string, std::optional<double>> binarize;

    void validate() const;  // throws InvalidArgument on inconsistency
};

/// Random DAG over v0..v(p-1): each pair (i<j) gets vi -> vj with
/// probability edge_prob.
MixedGraph random_dag(int p, double edge_prob, std::uint64_t seed);

/// Ancestral sampling of n rows, deterministic per seed.
Dataset sample(const ScmSpec& spec, int n, std::uint64_t seed);

/// Benchmark where a target T directly causes a few binary "signal"
/// features, a context variable drives binary "context" features that
/// also descend from the signal features (so they correlate with the
/// signal and with T, but are not adjacent to T), plus isolated noise
/// features. Ground-truth adjacency of T is exactly the signal set.
struct Benchmark {
    ScmSpec spec;
    std::string target;
    std::vector<std::string> signal_features;
    std::vector<std::string> context_features;
    std::vector<std::string> noise_features;
};

Benchmark confounded_benchmark(int n_signal, int n_context, int n_noise,
                               std::uint64_t seed);

nlohmann::json scm_to_json(const ScmSpec& spec);
ScmSpec scm_from_json(const nlohmann::json& j);

}  // namespace causalsel
