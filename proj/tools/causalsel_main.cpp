// Command-line front end: CSV in, DOT/JSON/CSV reports out.
//
// Subcommands:
//   simulate   write the synthetic benchmark CSV plus its ground-truth spec
//   discover   run pc or fges over all columns, write CPDAG as DOT + JSON
//   select     write per-target feature selections as JSON
//   evaluate   cross-validated RMSE/R2 per (method, target) + summary CSV
//   stability  bootstrap selection probabilities per (method, target)

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "causalsel/dataset.hpp"
#include "causalsel/errors.hpp"
#include "causalsel/ges.hpp"
#include "causalsel/graph.hpp"
#include "causalsel/pc.hpp"
#include "causalsel/pipeline.hpp"
#include "causalsel/scm.hpp"

namespace {

using causalsel::Dataset;
using causalsel::MixedGraph;
using causalsel::PipelineConfig;
using causalsel::SelectMethod;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitRuntimeError = 2;

struct Options {
    std::string input;
    std::vector<std::string> targets;
    std::string algo = "pc";
    double alpha = 0.05;
    double penalty_discount = 0.1;
    double l1 = 0.01;
    int folds = 10;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_cond_size;
    std::optional<int> max_parents;
    int jobs = 1;
    std::string out_prefix = "./";
    // simulate
    int n_signal = 5;
    int n_context = 20;
    int n_noise = 80;
    int rows = 4000;
    // stability
    int repetitions = 10;
    double drop_fraction = 0.10;
};

std::uint64_t resolve_seed(const Options& opt) {
    if (opt.seed) return *opt.seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    std::cout << "seed: " << s << " (randomly chosen; pass --seed to replay)\n";
    return s;
}

PipelineConfig pipeline_config(const Options& opt) {
    PipelineConfig cfg;
    cfg.pc.alpha = opt.alpha;
    cfg.pc.max_cond_size = opt.max_cond_size;
    cfg.ges.penalty_discount = opt.penalty_discount;
    cfg.ges.max_parents = opt.max_parents;
    cfg.lasso.l1_penalty = opt.l1;
    return cfg;
}

std::vector<SelectMethod> methods_for(const std::string& algo) {
    if (algo == "all")
        return {SelectMethod::Pc, SelectMethod::Fges, SelectMethod::Lasso};
    return {causalsel::method_from_name(algo)};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw causalsel::IoError("cannot write " + path);
    out << text;
    if (!out) throw causalsel::IoError("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json graph_to_json(const MixedGraph& g) {
    nlohmann::json j;
    std::vector<std::string> names = g.node_names();
    std::sort(names.begin(), names.end());
    j["nodes"] = names;
    j["edges"] = nlohmann::json::array();
    for (const causalsel::Edge& e : g.edges())
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"type", e.mark == causalsel::EdgeMark::Directed
                                           ? "directed"
                                           : "undirected"}});
    return j;
}

int cmd_simulate(const Options& opt) {
    const std::uint64_t seed = resolve_seed(opt);
    const causalsel::Benchmark bench =
        causalsel::confounded_benchmark(opt.n_signal, opt.n_context, opt.n_noise, seed);
    const Dataset data = causalsel::sample(bench.spec, opt.rows, causalsel::derive_seed(seed, 0));
    causalsel::write_csv(data, opt.out_prefix + "benchmark.csv");

    nlohmann::json j = causalsel::scm_to_json(bench.spec);
    j["target"] = bench.target;
    j["signal_features"] = bench.signal_features;
    j["context_features"] = bench.context_features;
    j["noise_features"] = bench.noise_features;
    j["seed"] = seed;
    j["rows"] = opt.rows;
    write_json(opt.out_prefix + "benchmark_spec.json", j);
    std::cout << "wrote " << opt.out_prefix << "benchmark.csv and "
              << opt.out_prefix << "benchmark_spec.json\n";
    return kExitOk;
}

int cmd_discover(const Options& opt) {
    const Dataset data = causalsel::standardize(causalsel::read_csv(opt.input));
    const PipelineConfig cfg = pipeline_config(opt);

    MixedGraph graph;
    long test_count = -1;
    if (opt.algo == "pc") {
        causalsel::PcResult res = causalsel::pc_search(data, cfg.pc);
        graph = res.graph;
        test_count = res.test_count;
    } else if (opt.algo == "fges") {
        graph = causalsel::ges_search(data, cfg.ges).graph;
    } else {
        throw causalsel::InvalidArgument("discover supports --algo pc or fges");
    }

    write_text(opt.out_prefix + "graph.dot", causalsel::to_dot(graph));
    nlohmann::json j = graph_to_json(graph);
    j["algorithm"] = opt.algo;
    if (test_count >= 0) j["ci_tests"] = test_count;
    write_json(opt.out_prefix + "graph.json", j);
    std::cout << "wrote " << opt.out_prefix << "graph.dot and " << opt.out_prefix
              << "graph.json (" << graph.edge_count() << " edges)\n";
    return kExitOk;
}

int cmd_select(const Options& opt) {
    const Dataset data = causalsel::read_csv(opt.input);
    const PipelineConfig cfg = pipeline_config(opt);
    for (const std::string& target : opt.targets) {
        for (SelectMethod method : methods_for(opt.algo)) {
            const causalsel::SelectionResult sel =
                causalsel::select_features(data, target, method, cfg);
            const std::string path = opt.out_prefix + "selection_" +
                                     causalsel::method_name(method) + "_" + target + ".json";
            write_json(path, causalsel::to_json(sel));
            std::cout << path << ": " << sel.selected.size() << " features\n";
        }
    }
    return kExitOk;
}

int cmd_evaluate(const Options& opt) {
    const Dataset data = causalsel::read_csv(opt.input);
    const PipelineConfig cfg = pipeline_config(opt);
    const std::uint64_t seed = resolve_seed(opt);

    std::string summary = "method,target,r2_mean,rmse_mean\n";
    for (const std::string& target : opt.targets) {
        for (SelectMethod method : methods_for(opt.algo)) {
            const causalsel::EvalReport report = causalsel::evaluate(
                data, target, method, cfg, opt.folds, seed, opt.jobs);
            const std::string path = opt.out_prefix + "eval_" +
                                     causalsel::method_name(method) + "_" + target + ".json";
            write_json(path, causalsel::to_json(report));
            summary += causalsel::method_name(method) + "," + target + "," +
                       std::to_string(report.r2_mean) + "," +
                       std::to_string(report.rmse_mean) + "\n";
            std::cout << causalsel::method_name(method) << " / " << target
                      << ": R2 " << report.r2_mean << ", RMSE " << report.rmse_mean << "\n";
        }
    }
    write_text(opt.out_prefix + "summary.csv", summary);
    return kExitOk;
}

int cmd_stability(const Options& opt) {
    const Dataset data = causalsel::read_csv(opt.input);
    const PipelineConfig cfg = pipeline_config(opt);
    const std::uint64_t seed = resolve_seed(opt);
    for (const std::string& target : opt.targets) {
        for (SelectMethod method : methods_for(opt.algo)) {
            const causalsel::StabilityReport report = causalsel::stability_test(
                data, target, method, cfg, opt.repetitions, opt.drop_fraction, seed, opt.jobs);
            const std::string path = opt.out_prefix + "stability_" +
                                     causalsel::method_name(method) + "_" + target + ".json";
            write_json(path, causalsel::to_json(report));
            std::cout << path << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal-structure-based feature selection and evaluation"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_input, bool needs_target) {
        if (needs_input)
            sub->add_option("--input", opt.input, "input CSV (header row required)")
                ->required();
        if (needs_target)
            sub->add_option("--target", opt.targets, "target column (repeatable)")
                ->required();
        sub->add_option("--alpha", opt.alpha, "CI significance level")
            ->capture_default_str();
        sub->add_option("--penalty-discount", opt.penalty_discount, "BIC penalty discount c")
            ->capture_default_str();
        sub->add_option("--l1", opt.l1, "LASSO L1 penalty")->capture_default_str();
        sub->add_option("--max-cond-size", opt.max_cond_size,
                        "cap on PC conditioning set size");
        sub->add_option("--max-parents", opt.max_parents, "cap on FGES parent count");
        sub->add_option("--seed", opt.seed, "RNG seed (random and printed when omitted)");
        sub->add_option("--jobs", opt.jobs, "worker threads")->capture_default_str();
        sub->add_option("--out", opt.out_prefix, "output path prefix")
            ->capture_default_str();
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate the synthetic benchmark");
    simulate->add_option("--signal", opt.n_signal, "signal feature count")
        ->capture_default_str();
    simulate->add_option("--context", opt.n_context, "context feature count")
        ->capture_default_str();
    simulate->add_option("--noise", opt.n_noise, "noise feature count")
        ->capture_default_str();
    simulate->add_option("--rows", opt.rows, "sample size")->capture_default_str();
    add_common(simulate, false, false);

    CLI::App* discover = app.add_subcommand("discover", "learn a CPDAG over all columns");
    discover->add_option("--algo", opt.algo, "pc|fges")->capture_default_str();
    add_common(discover, true, false);

    CLI::App* select = app.add_subcommand("select", "per-target feature selection");
    select->add_option("--algo", opt.algo, "pc|fges|lasso|all")->capture_default_str();
    add_common(select, true, true);

    CLI::App* eval = app.add_subcommand("evaluate", "cross-validated RMSE/R2");
    eval->add_option("--algo", opt.algo, "pc|fges|lasso|all")->capture_default_str();
    eval->add_option("--folds", opt.folds, "cross-validation folds")->capture_default_str();
    add_common(eval, true, true);

    CLI::App* stability = app.add_subcommand("stability", "bootstrap selection frequencies");
    stability->add_option("--algo", opt.algo, "pc|fges|lasso|all")->capture_default_str();
    stability->add_option("--repetitions", opt.repetitions, "bootstrap repetitions")
        ->capture_default_str();
    stability->add_option("--drop-fraction", opt.drop_fraction, "row fraction dropped")
        ->capture_default_str();
    add_common(stability, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (discover->parsed()) return cmd_discover(opt);
        if (select->parsed()) return cmd_select(opt);
        if (eval->parsed()) return cmd_evaluate(opt);
        if (stability->parsed()) return cmd_stability(opt);
    } catch (const causalsel::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const causalsel::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const causalsel::DuplicateColumn& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const causalsel::UnknownColumn& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitInputError;
}
