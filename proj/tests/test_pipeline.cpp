#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "causalsel/errors.hpp"
#include "causalsel/pc.hpp"
#include "causalsel/pipeline.hpp"
#include "causalsel/scm.hpp"
#include "test_util.hpp"

using namespace causalsel;

namespace {

Dataset random_normal(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd m(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = gauss(rng);
    std::vector<std::string> names;
    for (int j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
    return Dataset(m, names);
}

}  // namespace

TEST_CASE("kfold_split: singleton folds, partition, determinism") {
    const auto folds = kfold_split(10, 10, 3);
    REQUIRE(folds.size() == 10);
    std::set<int> seen;
    for (const FoldSplit& f : folds) {
        CHECK(f.test.size() == 1);
        CHECK(f.train.size() == 9);
        seen.insert(f.test.begin(), f.test.end());
    }
    CHECK(seen.size() == 10);

    const auto a = kfold_split(103, 10, 7);
    const auto b = kfold_split(103, 10, 7);
    for (size_t f = 0; f < a.size(); ++f) {
        CHECK(a[f].test == b[f].test);
        CHECK(a[f].train == b[f].train);
    }
    // sizes differ by at most one, every index in exactly one test set
    std::vector<int> count(103, 0);
    for (const FoldSplit& f : a) {
        CHECK(f.test.size() >= 10);
        CHECK(f.test.size() <= 11);
        for (int i : f.test) ++count[i];
    }
    CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));

    CHECK_THROWS_AS(kfold_split(5, 10, 1), TooFewRows);
    CHECK_THROWS_AS(kfold_split(10, 1, 1), InvalidArgument);
}

TEST_CASE("derive_seed: distinct indexes decorrelate, deterministic") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("selection_from_graph: adjacency with marks, target excluded") {
    MixedGraph g({"T", "A", "B", "C", "D"});
    g.add_directed("T", "A");
    g.add_directed("B", "T");
    g.add_undirected("C", "T");
    const SelectionResult sel = selection_from_graph(g, "T", SelectMethod::Pc);
    CHECK(sel.selected == std::vector<std::string>{"A", "B", "C"});
    CHECK(sel.evidence.at("A").mark == "->");
    CHECK(sel.evidence.at("B").mark == "<-");
    CHECK(sel.evidence.at("C").mark == "--");
    CHECK(sel.evidence.count("D") == 0);
    CHECK(std::find(sel.selected.begin(), sel.selected.end(), "T") == sel.selected.end());

    const SelectionResult empty =
        selection_from_graph(MixedGraph({"T", "A"}), "T", SelectMethod::Fges);
    CHECK(empty.selected.empty());
}

TEST_CASE("select_features: lasso evidence carries coefficients") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    const int n = 500;
    Eigen::MatrixXd m(n, 3);
    for (int i = 0; i < n; ++i) {
        m(i, 1) = gauss(rng);
        m(i, 2) = gauss(rng);
        m(i, 0) = 0.9 * m(i, 1) + 0.3 * gauss(rng);  // target driven by f1 only
    }
    const Dataset data(m, {"y", "f1", "f2"});
    PipelineConfig cfg;
    cfg.lasso.l1_penalty = 0.05;
    const SelectionResult sel = select_features(data, "y", SelectMethod::Lasso, cfg);
    REQUIRE(std::find(sel.selected.begin(), sel.selected.end(), "f1") != sel.selected.end());
    CHECK(sel.evidence.at("f1").mark == "coef");
    CHECK(sel.evidence.at("f1").coefficient != 0.0);
    CHECK(std::find(sel.selected.begin(), sel.selected.end(), "y") == sel.selected.end());

    CHECK_THROWS_AS(select_features(data, "nope", SelectMethod::Lasso, cfg), UnknownColumn);
}

TEST_CASE("select_features: pc and fges pick the chain neighbor set") {
    const Dataset data = sample(test_util::chain_spec(), 10000, 61);
    PipelineConfig cfg;
    for (SelectMethod method : {SelectMethod::Pc, SelectMethod::Fges}) {
        const SelectionResult sel = select_features(data, "Y", method, cfg);
        CHECK(sel.selected == std::vector<std::string>{"X", "Z"});
    }
}

TEST_CASE("compute_metrics: hand example, perfect prediction, degenerate fold") {
    Eigen::VectorXd obs(3), pred(3);
    obs << 1, 2, 3;
    pred << 2, 2, 2;
    const FoldMetrics m = compute_metrics(obs, pred);
    CHECK(m.rmse == doctest::Approx(0.816496580927726033).epsilon(1e-12));
    CHECK(m.r2_percent == doctest::Approx(0.0).epsilon(1e-12));

    const FoldMetrics perfect = compute_metrics(obs, obs);
    CHECK(perfect.rmse == 0.0);
    CHECK(perfect.r2_percent == 100.0);

    Eigen::VectorXd constant = Eigen::VectorXd::Constant(3, 5.0);
    CHECK_THROWS_AS(compute_metrics(constant, pred), DegenerateFold);
    CHECK_THROWS_AS(compute_metrics(obs, Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST_CASE("compute_metrics: R2 identity against RMSE") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 20 + static_cast<int>(rng() % 50);
        Eigen::VectorXd obs(n), pred(n);
        for (int i = 0; i < n; ++i) {
            obs(i) = gauss(rng);
            pred(i) = gauss(rng);
        }
        const FoldMetrics m = compute_metrics(obs, pred);
        const double sst = (obs.array() - obs.mean()).matrix().squaredNorm();
        const double identity = 100.0 * (1.0 - m.rmse * m.rmse * n / sst);
        CHECK(m.r2_percent == doctest::Approx(identity).epsilon(1e-9));
        CHECK(m.r2_percent <= 100.0);
        CHECK(m.rmse >= 0.0);
    }
}

TEST_CASE("evaluate: perfect predictor via a duplicated target feature") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    const int n = 300;
    Eigen::MatrixXd m(n, 4);
    for (int i = 0; i < n; ++i) {
        m(i, 0) = gauss(rng);
        m(i, 1) = m(i, 0);  // exact copy of the target
        m(i, 2) = gauss(rng);
        m(i, 3) = gauss(rng);
    }
    const Dataset data(m, {"y", "copy", "n1", "n2"});
    PipelineConfig cfg;
    const EvalReport report = evaluate(data, "y", SelectMethod::Lasso, cfg, 10, 11);
    CHECK(report.per_fold.size() == 10);
    CHECK(report.rmse_mean < 1e-6);
    CHECK(report.r2_mean == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("evaluate: empty selection falls back to the mean model") {
    const Dataset data = random_normal(2000, 4, 71);  // all columns independent
    PipelineConfig cfg;
    const EvalReport report = evaluate(data, "f0", SelectMethod::Pc, cfg, 10, 5);
    CHECK(report.per_fold.size() == 10);
    // mean model: R2 near zero (test mean differs slightly from train mean)
    CHECK(std::abs(report.r2_mean) < 10.0);
    CHECK(report.rmse_mean > 0.5);
}

TEST_CASE("evaluate: deterministic and invariant to the worker count") {
    const Dataset data = sample(test_util::diamond_spec(), 400, 15);
    PipelineConfig cfg;
    const EvalReport a = evaluate(data, "D", SelectMethod::Fges, cfg, 5, 17, 1);
    const EvalReport b = evaluate(data, "D", SelectMethod::Fges, cfg, 5, 17, 4);
    const EvalReport c = evaluate(data, "D", SelectMethod::Fges, cfg, 5, 17, 1);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(to_json(a).dump() == to_json(c).dump());
}

TEST_CASE("stability_test: stubbed selector gives probability one") {
    const Dataset data = random_normal(100, 3, 21);
    Selector stub = [](const Dataset& d, const std::string& target) {
        SelectionResult r;
        r.target = target;
        r.method = SelectMethod::Pc;
        r.selected = {"f1"};
        r.evidence["f1"] = Evidence{"--", 0.0};
        (void)d;
        return r;
    };
    const StabilityReport report = stability_test(data, "f0", stub, "stub", 10, 0.10, 9);
    CHECK(report.probabilities.at("f1") == 1.0);
    CHECK(report.probabilities.at("f2") == 0.0);
    CHECK(report.probabilities.count("f0") == 0);  // target excluded
    CHECK(report.ranking.front() == "f1");
}

TEST_CASE("stability_test: probabilities live on the 1/repetitions grid") {
    const Dataset data = sample(test_util::chain_spec(), 400, 27);
    PipelineConfig cfg;
    const StabilityReport report =
        stability_test(data, "Z", SelectMethod::Pc, cfg, 10, 0.10, 31);
    for (const auto& [name, prob] : report.probabilities) {
        (void)name;
        const double scaled = prob * 10.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
        CHECK(prob >= 0.0);
        CHECK(prob <= 1.0);
    }
}

TEST_CASE("stability_test: same seed reproduces, jobs value irrelevant") {
    const Dataset data = sample(test_util::collider_spec(), 500, 37);
    PipelineConfig cfg;
    const StabilityReport a = stability_test(data, "Z", SelectMethod::Pc, cfg, 10, 0.1, 5, 1);
    const StabilityReport b = stability_test(data, "Z", SelectMethod::Pc, cfg, 10, 0.1, 5, 4);
    const StabilityReport c = stability_test(data, "Z", SelectMethod::Pc, cfg, 10, 0.1, 5, 1);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(to_json(a).dump() == to_json(c).dump());
}

TEST_CASE("population-level selection unchanged by an extra noise node") {
    MixedGraph dag({"T", "A", "B"});
    dag.add_directed("A", "T");
    dag.add_directed("T", "B");
    DSeparationOracle oracle(dag);
    const PcResult base = pc_search(oracle, PcConfig{});
    const SelectionResult sel_base = selection_from_graph(base.graph, "T", SelectMethod::Pc);

    MixedGraph extended({"T", "A", "B", "noise"});
    extended.add_directed("A", "T");
    extended.add_directed("T", "B");
    DSeparationOracle oracle2(extended);
    const PcResult ext = pc_search(oracle2, PcConfig{});
    const SelectionResult sel_ext = selection_from_graph(ext.graph, "T", SelectMethod::Pc);

    CHECK(sel_base.selected == sel_ext.selected);
}

TEST_CASE("report json round trips") {
    const Dataset data = sample(test_util::chain_spec(), 300, 41);
    PipelineConfig cfg;
    cfg.pc.max_cond_size = 2;
    cfg.ges.max_parents = 3;

    const SelectionResult sel = select_features(data, "Y", SelectMethod::Lasso, cfg);
    const SelectionResult sel_back = selection_from_json(to_json(sel));
    CHECK(to_json(sel_back).dump() == to_json(sel).dump());

    const EvalReport ev = evaluate(data, "Y", SelectMethod::Pc, cfg, 5, 13);
    const EvalReport ev_back = eval_report_from_json(to_json(ev));
    CHECK(to_json(ev_back).dump() == to_json(ev).dump());

    const StabilityReport st = stability_test(data, "Y", SelectMethod::Lasso, cfg, 5, 0.1, 19);
    const StabilityReport st_back = stability_from_json(to_json(st));
    CHECK(to_json(st_back).dump() == to_json(st).dump());
}

TEST_CASE("method names round trip") {
    for (SelectMethod m : {SelectMethod::Pc, SelectMethod::Fges, SelectMethod::Lasso})
        CHECK(method_from_name(method_name(m)) == m);
    CHECK_THROWS_AS(method_from_name("bogus"), InvalidArgument);
}
