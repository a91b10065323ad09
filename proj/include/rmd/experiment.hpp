#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmd/dataset.hpp"
#include "rmd/learn.hpp"

namespace rmd {

/// Configuration errors surface separately so the CLI can exit with a
/// distinct status.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetSource {
    std::string type;  // "mixture" | "banana" | "csv"
    int n = 0;
    MixtureSpec mixture;
    std::array<int, 3> banana_counts{150, 150, 150};
    std::vector<std::array<double, 2>> banana_outliers;
    std::string csv_path;
    std::string label_column;
    std::map<std::string, int> subsample;  // keys are label tokens
    bool normalize = false;                // per-feature standardization on ingest

    DataSet realize(std::uint64_t seed) const;
};

struct AlgoConfig {
    Algo algo = Algo::sc;
    int clusters = 2;
    bool normalized = false;
    int num_labeled = 20;   // grf/gtam
    double mu = 0.05;       // gtam
    double tol = 1e-10;     // grf
    bool divisive = false;  // sc in divisive mode
};

/// One experiment: dataset x graph kinds x seeds, scored against the
/// generating labels.
struct ExperimentConfig {
    std::string name = "experiment";
    DatasetSource dataset;
    std::vector<DatasetSource> variants;  // optional sweep over dataset settings
    std::vector<std::string> variant_tags;
    StatisticSpec stat;
    int ustat_b = 10;
    std::vector<DegreeScheme> schemes;
    int k = 30;
    std::vector<GraphKind> graphs;
    WeightKind weights = WeightKind::binary;
    double sigma = 0.0;  // 0: average k-NN distance
    double eps = 0.0;
    AlgoConfig algo;
    double min_cluster_fraction = 0.05;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "results";
    int threads = 1;

    GraphRecipe recipe(GraphKind kind) const;
    void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

struct RunResult {
    std::string graph;
    std::string scheme;
    std::uint64_t seed = 0;
    double error = 0.0;
    CutReport report;
    bool selected = true;
    bool failed = false;
    std::string message;
};

struct ExperimentSummary {
    std::vector<RunResult> runs;  // selected result per (variant, graph, seed)
    std::vector<std::string> artifacts;
    int failures = 0;
};

/// Run every (graph kind x seed), write per-run JSON files, one aggregate
/// CSV per variant and a manifest of everything written.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// Plot-data emission: "cut_sweep" writes one CutCurve CSV per graph kind,
/// "rank_profile" writes (x1, rank) pairs.
std::vector<std::string> emit_curves(const ExperimentConfig& cfg, const std::string& kind);

}  // namespace rmd
