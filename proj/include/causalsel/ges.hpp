#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causalsel/dataset.hpp"
#include "causalsel/graph.hpp"

namespace causalsel {

struct GesConfig {
    double penalty_discount = 0.1;  // c in the penalized BIC
    std::optional<int> max_parents;
};

struct LocalScore {
    int node = 0;
    std::vector<int> parents;
    double value = 0.0;              // -n*ln(sigma2) - c*k*ln(n)
    double residual_variance = 0.0;  // ML residual variance, floored at 1e-12
    int k = 0;                       // |parents| + 1
    bool degenerate = false;         // variance hit the floor
};

struct GesStep {
    std::string from;
    std::string to;
    double delta = 0.0;
};

struct GesResult {
    MixedGraph graph;  // CPDAG of the final DAG
    MixedGraph dag;    // the DAG the greedy search ended on
    double total_score = 0.0;
    std::vector<GesStep> forward_steps;
    std::vector<GesStep> backward_steps;
};

/// Penalized Gaussian BIC local score of `node` given `parents`:
/// value = -n*ln(sigma2_ml) - c*(|parents|+1)*ln(n), regression with
/// intercept, structure-independent likelihood constants dropped.
LocalScore local_score(const Dataset& data, int node, const std::vector<int>& parents,
                       const GesConfig& cfg);

/// Sum of local scores over a fully directed acyclic graph.
double dag_score(const Dataset& data, const MixedGraph& dag, const GesConfig& cfg);

/// Greedy forward edge insertion to a local score maximum, then greedy
/// backward deletion, then CPDAG completion.
GesResult ges_search(const Dataset& data, const GesConfig& cfg);

}  // namespace causalsel
