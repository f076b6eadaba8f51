#include "causalsel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "causalsel/errors.hpp"

namespace causalsel {

std::string method_name(SelectMethod m) {
    switch (m) {
        case SelectMethod::Pc: return "pc";
        case SelectMethod::Fges: return "fges";
        case SelectMethod::Lasso: return "lasso";
    }
    throw InvalidArgument("unknown method");
}

SelectMethod method_from_name(const std::string& name) {
    if (name == "pc") return SelectMethod::Pc;
    if (name == "fges") return SelectMethod::Fges;
    if (name == "lasso") return SelectMethod::Lasso;
    throw InvalidArgument("unknown method name: " + name);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over (master, index)
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<FoldSplit> kfold_split(int n, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("kfold_split: k must be >= 2");
    if (n < k) throw TooFewRows("kfold_split: fewer rows than folds");

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<FoldSplit> folds(k);
    const int base = n / k, extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
        const int len = base + (f < extra ? 1 : 0);
        folds[f].test.assign(idx.begin() + pos, idx.begin() + pos + len);
        pos += len;
    }
    for (int f = 0; f < k; ++f) {
        std::sort(folds[f].test.begin(), folds[f].test.end());
        for (int g = 0; g < k; ++g)
            if (g != f)
                folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(),
                                      folds[g].test.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

SelectionResult selection_from_graph(const MixedGraph& graph, const std::string& target,
                                     SelectMethod method) {
    SelectionResult res;
    res.target = target;
    res.method = method;
    const int t = graph.index_of(target);
    for (int f : graph.adjacent(t)) {
        const std::string& name = graph.node_names()[f];
        Evidence ev;
        if (graph.has_directed(t, f))
            ev.mark = "->";
        else if (graph.has_directed(f, t))
            ev.mark = "<-";
        else
            ev.mark = "--";
        res.selected.push_back(name);
        res.evidence[name] = ev;
    }
    std::sort(res.selected.begin(), res.selected.end());
    return res;
}

SelectionResult select_features(const Dataset& train, const std::string& target,
                                SelectMethod method, const PipelineConfig& cfg) {
    train.column_index(target);  // throws UnknownColumn early

    if (method == SelectMethod::Lasso) {
        const Dataset features = train.drop_column(target);
        const LinearModel model = lasso_fit(features.values(), train.column(target), cfg.lasso);
        SelectionResult res;
        res.target = target;
        res.method = method;
        for (int j : model.support()) {
            const std::string& name = features.column_names()[j];
            res.selected.push_back(name);
            res.evidence[name] = Evidence{"coef", model.weights(j)};
        }
        std::sort(res.selected.begin(), res.selected.end());
        return res;
    }

    const Dataset std_train = standardize(train);
    const MixedGraph graph = method == SelectMethod::Pc
                                 ? pc_search(std_train, cfg.pc).graph
                                 : ges_search(std_train, cfg.ges).graph;
    return selection_from_graph(graph, target, method);
}

FoldMetrics compute_metrics(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted) {
    if (observed.size() != predicted.size() || observed.size() == 0)
        throw DimensionMismatch("compute_metrics: size mismatch");
    const int n = static_cast<int>(observed.size());
    const Eigen::VectorXd resid = observed - predicted;
    const double sse = resid.squaredNorm();
    const double mean = observed.mean();
    const double sst = (observed.array() - mean).matrix().squaredNorm();
    if (sst <= 0.0) throw DegenerateFold("constant observed values");
    FoldMetrics m;
    m.rmse = std::sqrt(sse / n);
    m.r2_percent = 100.0 * (1.0 - sse / sst);
    return m;
}

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex mu;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&, t] {
            for (int i = t; i < count; i += jobs) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

EvalReport evaluate(const Dataset& data, const std::string& target, SelectMethod method,
                    const PipelineConfig& cfg, int k, std::uint64_t seed, int jobs) {
    const std::vector<FoldSplit> folds = kfold_split(data.n(), k, seed);

    EvalReport report;
    report.target = target;
    report.method = method;
    report.fold_count = k;
    report.seed = seed;
    report.config = cfg;
    report.per_fold.resize(k);

    parallel_for(k, jobs, [&](int f) {
        const Dataset train = data.select_rows(folds[f].train);
        const Dataset test = data.select_rows(folds[f].test);
        const SelectionResult sel = select_features(train, target, method, cfg);

        const Eigen::VectorXd y_train = train.column(target);
        const Eigen::VectorXd y_test = test.column(target);
        LinearModel model;
        Eigen::VectorXd y_pred;
        if (sel.selected.empty()) {
            model = ols_fit(Eigen::MatrixXd(train.n(), 0), y_train);
            y_pred = predict(model, Eigen::MatrixXd(test.n(), 0));
        } else {
            model = ols_fit(train.select_columns(sel.selected).values(), y_train);
            y_pred = predict(model, test.select_columns(sel.selected).values());
        }
        report.per_fold[f] = compute_metrics(y_test, y_pred);
    });

    for (const FoldMetrics& m : report.per_fold) {
        report.rmse_mean += m.rmse / k;
        report.r2_mean += m.r2_percent / k;
    }
    return report;
}

StabilityReport stability_test(const Dataset& data, const std::string& target,
                               const Selector& selector, const std::string& method_label,
                               int repetitions, double drop_fraction, std::uint64_t seed,
                               int jobs) {
    if (repetitions < 1) throw InvalidArgument("stability_test: repetitions must be >= 1");
    if (drop_fraction < 0.0 || drop_fraction >= 1.0)
        throw InvalidArgument("stability_test: drop_fraction must be in [0,1)");
    const int n = data.n();
    const int drop = static_cast<int>(std::floor(n * drop_fraction));
    if (n - drop < 2) throw TooFewRows("stability_test: too few rows after dropping");

    std::vector<std::vector<std::string>> picks(repetitions);
    parallel_for(repetitions, jobs, [&](int r) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<int> keep(idx.begin() + drop, idx.end());
        std::sort(keep.begin(), keep.end());
        picks[r] = selector(data.select_rows(keep), target).selected;
    });

    StabilityReport report;
    report.target = target;
    report.method = method_label;
    report.repetitions = repetitions;
    report.drop_fraction = drop_fraction;
    report.seed = seed;
    std::map<std::string, int> counts;
    for (const auto& name : data.column_names())
        if (name != target) counts[name] = 0;
    for (const auto& sel : picks)
        for (const auto& name : sel) counts.at(name) += 1;
    for (const auto& [name, count] : counts)
        report.probabilities[name] = static_cast<double>(count) / repetitions;

    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [name, prob] : report.probabilities) ranked.emplace_back(-prob, name);
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [negp, name] : ranked) {
        (void)negp;
        report.ranking.push_back(name);
    }
    return report;
}

StabilityReport stability_test(const Dataset& data, const std::string& target,
                               SelectMethod method, const PipelineConfig& cfg,
                               int repetitions, double drop_fraction, std::uint64_t seed,
                               int jobs) {
    Selector selector = [&](const Dataset& d, const std::string& t) {
        return select_features(d, t, method, cfg);
    };
    return stability_test(data, target, selector, method_name(method), repetitions,
                          drop_fraction, seed, jobs);
}

namespace {

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["alpha"] = cfg.pc.alpha;
    j["max_cond_size"] =
        cfg.pc.max_cond_size ? nlohmann::json(*cfg.pc.max_cond_size) : nlohmann::json(nullptr);
    j["penalty_discount"] = cfg.ges.penalty_discount;
    j["max_parents"] =
        cfg.ges.max_parents ? nlohmann::json(*cfg.ges.max_parents) : nlohmann::json(nullptr);
    j["l1_penalty"] = cfg.lasso.l1_penalty;
    j["lasso_tol"] = cfg.lasso.tol;
    j["lasso_max_iters"] = cfg.lasso.max_iters;
    j["standardize_features"] = true;
    return j;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.pc.alpha = j.at("alpha").get<double>();
    if (!j.at("max_cond_size").is_null())
        cfg.pc.max_cond_size = j.at("max_cond_size").get<int>();
    cfg.ges.penalty_discount = j.at("penalty_discount").get<double>();
    if (!j.at("max_parents").is_null()) cfg.ges.max_parents = j.at("max_parents").get<int>();
    cfg.lasso.l1_penalty = j.at("l1_penalty").get<double>();
    cfg.lasso.tol = j.at("lasso_tol").get<double>();
    cfg.lasso.max_iters = j.at("lasso_max_iters").get<int>();
    return cfg;
}

}  // namespace

nlohmann::json to_json(const SelectionResult& r) {
    nlohmann::json j;
    j["target"] = r.target;
    j["method"] = method_name(r.method);
    j["selected"] = r.selected;
    nlohmann::json ev = nlohmann::json::object();
    for (const auto& [name, e] : r.evidence) {
        if (e.mark == "coef")
            ev[name] = {{"mark", e.mark}, {"coefficient", e.coefficient}};
        else
            ev[name] = {{"mark", e.mark}};
    }
    j["evidence"] = ev;
    return j;
}

SelectionResult selection_from_json(const nlohmann::json& j) {
    SelectionResult r;
    r.target = j.at("target").get<std::string>();
    r.method = method_from_name(j.at("method").get<std::string>());
    r.selected = j.at("selected").get<std::vector<std::string>>();
    for (const auto& [name, e] : j.at("evidence").items()) {
        Evidence ev;
        ev.mark = e.at("mark").get<std::string>();
        if (e.contains("coefficient")) ev.coefficient = e.at("coefficient").get<double>();
        r.evidence[name] = ev;
    }
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["target"] = r.target;
    j["method"] = method_name(r.method);
    j["fold_count"] = r.fold_count;
    j["seed"] = r.seed;
    j["per_fold"] = nlohmann::json::array();
    for (const FoldMetrics& m : r.per_fold)
        j["per_fold"].push_back({{"rmse", m.rmse}, {"r2_percent", m.r2_percent}});
    j["rmse_mean"] = r.rmse_mean;
    j["r2_mean"] = r.r2_mean;
    j["config"] = config_to_json(r.config);
    return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.target = j.at("target").get<std::string>();
    r.method = method_from_name(j.at("method").get<std::string>());
    r.fold_count = j.at("fold_count").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& m : j.at("per_fold"))
        r.per_fold.push_back(
            {m.at("rmse").get<double>(), m.at("r2_percent").get<double>()});
    r.rmse_mean = j.at("rmse_mean").get<double>();
    r.r2_mean = j.at("r2_mean").get<double>();
    r.config = config_from_json(j.at("config"));
    return r;
}

nlohmann::json to_json(const StabilityReport& r) {
    nlohmann::json j;
    j["target"] = r.target;
    j["method"] = r.method;
    j["repetitions"] = r.repetitions;
    j["drop_fraction"] = r.drop_fraction;
    j["seed"] = r.seed;
    j["probabilities"] = r.probabilities;
    j["ranking"] = r.ranking;
    return j;
}

StabilityReport stability_from_json(const nlohmann::json& j) {
    StabilityReport r;
    r.target = j.at("target").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.repetitions = j.at("repetitions").get<int>();
    r.drop_fraction = j.at("drop_fraction").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.probabilities = j.at("probabilities").get<std::map<std::string, double>>();
    r.ranking = j.at("ranking").get<std::vector<std::string>>();
    return r;
}

}  // namespace causalsel
