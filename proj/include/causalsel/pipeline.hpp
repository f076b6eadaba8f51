#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causalsel/dataset.hpp"
#include "causalsel/ges.hpp"
#include "causalsel/lasso.hpp"
#include "causalsel/pc.hpp"

namespace causalsel {

enum class SelectMethod { Pc, Fges, Lasso };

std::string method_name(SelectMethod m);
SelectMethod method_from_name(const std::string& name);

struct PipelineConfig {
    PcConfig pc;
    GesConfig ges;
    LassoConfig lasso;
};

struct FoldSplit {
    std::vector<int> train;
    std::vector<int> test;
};

/// Seeded shuffle split; test sets partition 0..n-1, sizes differ by at
/// most one.
std::vector<FoldSplit> kfold_split(int n, int k, std::uint64_t seed);

/// Deterministic per-job sub-seed (splitmix64 of master and index), the
/// contract that makes parallel and serial runs identical.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct Evidence {
    std::string mark;          // "->" target causes feature, "<-", "--", "coef"
    double coefficient = 0.0;  // lasso only
};

struct SelectionResult {
    std::string target;
    SelectMethod method = SelectMethod::Pc;
    std::vector<std::string> selected;
    std::map<std::string, Evidence> evidence;
};

/// Features adjacent to the target in a learned graph, any edge mark.
SelectionResult selection_from_graph(const MixedGraph& graph, const std::string& target,
                                     SelectMethod method);

/// Per-fold selection: PC/FGES run over all columns including the target
/// and keep the target's CPDAG neighbors; LASSO keeps the nonzero
/// support of lasso_fit(features, target).
SelectionResult select_features(const Dataset& train, const std::string& target,
                                SelectMethod method, const PipelineConfig& cfg);

struct FoldMetrics {
    double rmse = 0.0;
    double r2_percent = 0.0;
};

FoldMetrics compute_metrics(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted);

struct EvalReport {
    std::string target;
    SelectMethod method = SelectMethod::Pc;
    std::vector<FoldMetrics> per_fold;
    double rmse_mean = 0.0;
    double r2_mean = 0.0;
    int fold_count = 10;
    std::uint64_t seed = 0;
    PipelineConfig config;
};

/// k-fold protocol: select on the training split, OLS on the selected
/// columns (mean model when empty), RMSE and R2 on the test split with
/// the test-split mean as baseline. Folds may run on `jobs` threads;
/// the report is identical for any jobs value.
EvalReport evaluate(const Dataset& data, const std::string& target, SelectMethod method,
                    const PipelineConfig& cfg, int k = 10, std::uint64_t seed = 0,
                    int jobs = 1);

struct StabilityReport {
    std::string target;
    std::string method;
    int repetitions = 10;
    double drop_fraction = 0.10;
    std::uint64_t seed = 0;
    std::map<std::string, double> probabilities;  // feature -> selection frequency
    std::vector<std::string> ranking;             // descending probability
};

using Selector = std::function<SelectionResult(const Dataset&, const std::string&)>;

/// Bootstrap-style stability: per repetition drop a seeded 10% of rows,
/// reselect, and report per-feature selection frequencies.
StabilityReport stability_test(const Dataset& data, const std::string& target,
                               SelectMethod method, const PipelineConfig& cfg,
                               int repetitions = 10, double drop_fraction = 0.10,
                               std::uint64_t seed = 0, int jobs = 1);

/// Selector-seam variant used for stubbed selectors in tests.
StabilityReport stability_test(const Dataset& data, const std::string& target,
                               const Selector& selector, const std::string& method_label,
                               int repetitions, double drop_fraction, std::uint64_t seed,
                               int jobs = 1);

nlohmann::json to_json(const SelectionResult& r);
SelectionResult selection_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StabilityReport& r);
StabilityReport stability_from_json(const nlohmann::json& j);

}  // namespace causalsel
