#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "causalsel/dataset.hpp"
#include "causalsel/graph.hpp"
#include "causalsel/stats.hpp"

namespace causalsel {

struct PcConfig {
    double alpha = 0.05;
    std::optional<int> max_cond_size;  // cap on |S|; unset = adjacency-bounded
};

/// Conditional-independence test seam. pc_search only sees this
/// interface, so the Fisher-z test can be swapped for a d-separation
/// oracle in structure-recovery tests.
class CiOracle {
public:
    virtual ~CiOracle() = default;
    virtual CiTestResult test(int i, int j, const std::vector<int>& cond) = 0;
    virtual const std::vector<std::string>& variable_names() const = 0;
};

/// Fisher-z test against the sample correlation matrix of a dataset.
class FisherZOracle : public CiOracle {
public:
    FisherZOracle(const Dataset& data, double alpha);
    CiTestResult test(int i, int j, const std::vector<int>& cond) override;
    const std::vector<std::string>& variable_names() const override { return names_; }

private:
    CorrelationMatrix corr_;
    std::vector<std::string> names_;
    int n_;
    double alpha_;
};

/// Population oracle: independent iff d-separated in a known DAG.
class DSeparationOracle : public CiOracle {
public:
    explicit DSeparationOracle(MixedGraph dag);
    CiTestResult test(int i, int j, const std::vector<int>& cond) override;
    const std::vector<std::string>& variable_names() const override;

private:
    MixedGraph dag_;
};

struct SkeletonResult {
    MixedGraph graph;
    SepsetMap sepsets;
    long test_count = 0;
};

struct PcResult {
    MixedGraph graph;  // CPDAG
    SepsetMap sepsets;
    long test_count = 0;
    std::vector<std::pair<std::string, std::string>> conflicts;
};

/// PC-stable skeleton phase: level-wise conditional-independence pruning
/// of the complete graph, adjacency sets snapshotted per level, subsets
/// enumerated in lexicographic order over name-sorted neighbors.
SkeletonResult pc_skeleton(CiOracle& oracle, const PcConfig& cfg);
SkeletonResult pc_skeleton(const Dataset& data, const PcConfig& cfg);

/// Full PC: skeleton, then collider orientation, then Meek closure.
PcResult pc_search(CiOracle& oracle, const PcConfig& cfg);
PcResult pc_search(const Dataset& data, const PcConfig& cfg);

}  // namespace causalsel
