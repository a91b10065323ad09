// Command line front end: one verb per pipeline stage plus an end-to-end
// experiment runner. Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "rmd/bmatching.hpp"
#include "rmd/experiment.hpp"

using namespace rmd;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
};

ExperimentConfig load_with_overrides(const GlobalOpts& opts) {
    ExperimentConfig cfg = load_config(opts.config);
    if (opts.seed.has_value()) cfg.seeds = {*opts.seed};
    if (!opts.out.empty()) cfg.out_dir = opts.out;
    if (opts.threads > 0) cfg.threads = opts.threads;
    return cfg;
}

fs::path ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

int cmd_generate(const GlobalOpts& opts) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    const DataSet ds = cfg.dataset.realize(cfg.seeds.front());
    const fs::path path = ensure_parent(fs::path(cfg.out_dir) / (cfg.name + "_data.csv"));
    save_csv(ds, path.string());
    std::cout << path.string() << '\n';
    return 0;
}

int cmd_rank(const GlobalOpts& opts) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    const DataSet ds = cfg.dataset.realize(cfg.seeds.front());
    const RankVector ranks = rank_ustat(ds, cfg.stat, cfg.ustat_b, cfg.seeds.front());
    const fs::path path = ensure_parent(fs::path(cfg.out_dir) / (cfg.name + "_ranks.csv"));
    save_rank_csv(ranks, path.string());
    std::cout << path.string() << '\n';
    return 0;
}

int cmd_graph(const GlobalOpts& opts, const std::string& kind) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    const GraphKind gk = kind.empty() ? cfg.graphs.front() : graph_kind_from_string(kind);
    const DataSet ds = cfg.dataset.realize(cfg.seeds.front());
    const SparseGraph g = cfg.recipe(gk).build(ds, cfg.seeds.front());
    const fs::path path =
        ensure_parent(fs::path(cfg.out_dir) / (cfg.name + "_" + to_string(gk) + "_edges.csv"));
    save_edge_csv(g, path.string());
    std::cout << path.string() << '\n';
    return 0;
}

json partition_report(const DataSet& ds, const SparseGraph& g, const Partition& p) {
    const CutReport rep = cut_metrics(g, p);
    json j;
    j["cut"] = rep.cut;
    j["ratio_cut"] = rep.ratio_cut;
    j["ncut"] = rep.ncut;
    j["cluster_sizes"] = rep.cluster_sizes;
    if (ds.has_labels()) j["error_rate"] = error_rate(p, ds.labels);
    j["assignment"] = p.assignment;
    return j;
}

int cmd_cluster(const GlobalOpts& opts) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    const std::uint64_t seed = cfg.seeds.front();
    const DataSet ds = cfg.dataset.realize(seed);
    const GraphKind gk = cfg.graphs.front();
    json out;
    if (cfg.algo.divisive) {
        const Partition p = divisive_cluster(ds, cfg.algo.clusters, cfg.recipe(gk), seed);
        const SparseGraph g = cfg.recipe(gk).build(ds, seed);
        out = partition_report(ds, g, p);
        out["algorithm"] = "divisive";
    } else if (gk == GraphKind::rmd) {
        CvConfig cv;
        cv.schemes = cfg.schemes;
        cv.min_cluster_fraction = cfg.min_cluster_fraction;
        cv.recipe = cfg.recipe(gk);
        cv.clusters = cfg.algo.clusters;
        cv.normalized = cfg.algo.normalized;
        const CvOutcome outcome = cross_validate(ds, cv, Algo::sc, seed);
        const SparseGraph g =
            cv.recipe.with_scheme(outcome.best().scheme).build(ds, seed);
        out = partition_report(ds, g, outcome.best().partition);
        out["algorithm"] = "sc";
        out["scheme"] = outcome.best().scheme.name();
    } else {
        const SparseGraph g = cfg.recipe(gk).build(ds, seed);
        const Partition p = spectral_clustering(g, cfg.algo.clusters, cfg.algo.normalized, seed);
        out = partition_report(ds, g, p);
        out["algorithm"] = "sc";
    }
    out["graph"] = to_string(gk);
    out["seed"] = seed;
    const fs::path path = ensure_parent(fs::path(cfg.out_dir) / (cfg.name + "_cluster.json"));
    std::ofstream f(path);
    f << out.dump(2) << '\n';
    std::cout << path.string() << '\n';
    return 0;
}

int cmd_ssl(const GlobalOpts& opts) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    if (cfg.algo.algo == Algo::sc)
        throw ConfigError("ssl verb needs algorithm grf or gtam in the config");
    const std::uint64_t seed = cfg.seeds.front();
    const DataSet ds = cfg.dataset.realize(seed);
    if (!ds.has_labels()) throw ConfigError("ssl needs a labeled dataset");
    const LabeledSplit split = make_labeled_split(ds, cfg.algo.num_labeled, seed ^ 0x5b5b5b5bULL);
    std::vector<int> known;
    for (int id : split.labeled) known.push_back(ds.labels[id]);

    const GraphKind gk = cfg.graphs.front();
    const SparseGraph g = cfg.recipe(gk).build(ds, seed);
    const Labeling lab = cfg.algo.algo == Algo::grf ? grf(g, split, known, cfg.algo.tol)
                                                    : gtam(g, split, known, cfg.algo.mu);
    json out;
    out["algorithm"] = to_string(cfg.algo.algo);
    out["graph"] = to_string(gk);
    out["seed"] = seed;
    out["error_rate"] = ssl_error_rate(lab, ds.labels, split);
    out["num_labeled"] = split.labeled.size();
    out["hard"] = lab.hard;
    const fs::path path = ensure_parent(fs::path(cfg.out_dir) / (cfg.name + "_ssl.json"));
    std::ofstream f(path);
    f << out.dump(2) << '\n';
    std::cout << path.string() << '\n';
    return 0;
}

int cmd_sweep(const GlobalOpts& opts, const std::string& kind) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    for (const std::string& path : emit_curves(cfg, kind)) std::cout << path << '\n';
    return 0;
}

int cmd_experiment(const GlobalOpts& opts) {
    const ExperimentConfig cfg = load_with_overrides(opts);
    const ExperimentSummary summary = run_experiment(cfg);
    std::cout << summary.artifacts.back() << '\n';  // the manifest
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-modulated degree graphs: construction, clustering and transduction"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config, "JSON experiment config")->required();
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override: run only this seed");
    app.add_option("--out", opts.out, "Override: output directory");
    app.add_option("--threads", opts.threads, "Worker threads for fan-out stages");

    auto* generate = app.add_subcommand("generate", "Write the configured dataset as CSV");
    auto* rank = app.add_subcommand("rank", "Write U-statistic ranks as CSV");
    auto* graph = app.add_subcommand("graph", "Build one graph and write its edge list");
    std::string graph_kind;
    graph->add_option("--kind", graph_kind, "Graph kind (defaults to the first configured)");
    auto* cluster = app.add_subcommand("cluster", "Spectral or divisive clustering");
    auto* ssl = app.add_subcommand("ssl", "Transduction with grf or gtam");
    auto* sweep = app.add_subcommand("sweep", "Emit plot data");
    std::string sweep_kind = "cut_sweep";
    sweep->add_option("--kind", sweep_kind, "cut_sweep or rank_profile");
    auto* experiment = app.add_subcommand("experiment", "Full experiment fan-out");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) opts.seed = seed_value;

    try {
        if (generate->parsed()) return cmd_generate(opts);
        if (rank->parsed()) return cmd_rank(opts);
        if (graph->parsed()) return cmd_graph(opts, graph_kind);
        if (cluster->parsed()) return cmd_cluster(opts);
        if (ssl->parsed()) return cmd_ssl(opts);
        if (sweep->parsed()) return cmd_sweep(opts, sweep_kind);
        if (experiment->parsed()) return cmd_experiment(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
