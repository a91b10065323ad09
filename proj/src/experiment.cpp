#include "rmd/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace rmd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DegreeScheme scheme_from_json(const json& j, int k) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "linear") return DegreeScheme::linear(k);
        if (name == "quadratic") return DegreeScheme::quadratic(k);
        if (name == "cubic") return DegreeScheme::cubic(k);
        throw ConfigError("unknown scheme '" + name + "'");
    }
    DegreeScheme s;
    s.k = j.value("k", k);
    const std::string phi = j.value("phi", "linear");
    if (phi == "linear") s.phi = PhiKind::linear;
    else if (phi == "quadratic") s.phi = PhiKind::quadratic;
    else if (phi == "cubic") s.phi = PhiKind::cubic;
    else if (phi == "custom") s.phi = PhiKind::custom;
    else throw ConfigError("unknown phi '" + phi + "'");
    s.lambda = j.value("lambda", 0.5);
    s.coeff = j.value("coeff", 1.0);
    if (j.contains("table")) s.table = j["table"].get<std::vector<double>>();
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return s;
}

StatisticSpec stat_from_json(const json& j) {
    StatisticSpec s;
    const std::string kind = j.value("kind", "avg_lnn_distance");
    if (kind == "eps_count") s.kind = StatKind::eps_count;
    else if (kind == "lnn_distance") s.kind = StatKind::lnn_distance;
    else if (kind == "avg_lnn_distance") s.kind = StatKind::avg_lnn_distance;
    else throw ConfigError("unknown statistic kind '" + kind + "'");
    s.eps = j.value("eps", 1.0);
    s.l = j.value("l", 50);
    s.weighted = j.value("weighted", false);
    return s;
}

DatasetSource dataset_from_json(const json& j) {
    DatasetSource src;
    src.type = j.value("type", "mixture");
    src.n = j.value("n", 500);
    if (src.type == "mixture") {
        if (!j.contains("components")) throw ConfigError("mixture dataset needs 'components'");
        for (const auto& cj : j["components"]) {
            GaussianComponent comp;
            comp.weight = cj.value("weight", 1.0);
            comp.mean = cj["mean"].get<std::vector<double>>();
            const auto& cov = cj["cov"];
            if (cov.is_array() && !cov.empty() && cov[0].is_array()) {
                for (const auto& row : cov) {
                    for (const auto& v : row) comp.cov.push_back(v.get<double>());
                }
            } else {
                // Flat array: the covariance diagonal.
                for (std::size_t a = 0; a < cov.size(); ++a) {
                    for (std::size_t b = 0; b < cov.size(); ++b) {
                        comp.cov.push_back(a == b ? cov[a].get<double>() : 0.0);
                    }
                }
            }
            src.mixture.components.push_back(std::move(comp));
        }
        try {
            src.mixture.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    } else if (src.type == "banana") {
        if (j.contains("counts")) {
            const auto counts = j["counts"].get<std::vector<int>>();
            if (counts.size() != 3) throw ConfigError("banana dataset needs 3 counts");
            std::copy(counts.begin(), counts.end(), src.banana_counts.begin());
        }
        if (j.contains("outliers")) {
            for (const auto& o : j["outliers"]) {
                src.banana_outliers.push_back({o[0].get<double>(), o[1].get<double>()});
            }
        }
    } else if (src.type == "csv") {
        src.csv_path = j.value("path", "");
        if (src.csv_path.empty()) throw ConfigError("csv dataset needs 'path'");
        src.label_column = j.value("label_column", "label");
        if (j.contains("subsample")) {
            for (const auto& [key, val] : j["subsample"].items()) {
                src.subsample[key] = val.get<int>();
            }
        }
        src.normalize = j.value("normalize", false);
    } else {
        throw ConfigError("unknown dataset type '" + src.type + "'");
    }
    return src;
}

json result_to_json(const RunResult& r, const std::string& algo_name) {
    json j;
    j["algorithm"] = algo_name;
    j["graph"] = r.graph;
    j["scheme"] = r.scheme;
    j["seed"] = r.seed;
    j["error_rate"] = r.error;
    j["cut"] = r.report.cut;
    j["ratio_cut"] = r.report.ratio_cut;
    j["ncut"] = r.report.ncut;
    j["cluster_sizes"] = r.report.cluster_sizes;
    j["selected"] = r.selected;
    return j;
}

}  // namespace

DataSet DatasetSource::realize(std::uint64_t seed) const {
    DataSet ds;
    if (type == "mixture") {
        ds = gen_mixture(mixture, n, seed);
    } else if (type == "banana") {
        ds = gen_banana_scene(banana_counts, banana_outliers, seed);
    } else if (type == "csv") {
        ds = load_csv(csv_path, label_column);
        if (!subsample.empty()) {
            std::map<int, int> per_class;
            for (const auto& [token, count] : subsample) {
                const auto it = std::find(ds.label_names.begin(), ds.label_names.end(), token);
                if (it == ds.label_names.end())
                    throw ConfigError("subsample class '" + token + "' not present in " + csv_path);
                per_class[static_cast<int>(it - ds.label_names.begin())] = count;
            }
            ds = subsample_unbalanced(ds, per_class, seed);
        }
    } else {
        throw ConfigError("unknown dataset type '" + type + "'");
    }
    if (normalize) {
        for (int a = 0; a < ds.dim; ++a) {
            double mean = 0.0, var = 0.0;
            for (int i = 0; i < ds.n; ++i) mean += ds.coord(i, a);
            mean /= ds.n;
            for (int i = 0; i < ds.n; ++i) {
                const double d = ds.coord(i, a) - mean;
                var += d * d;
            }
            const double sd = std::sqrt(var / std::max(1, ds.n - 1));
            if (sd <= 0) continue;
            for (int i = 0; i < ds.n; ++i) {
                ds.points[static_cast<std::size_t>(i) * ds.dim + a] = (ds.coord(i, a) - mean) / sd;
            }
        }
    }
    return ds;
}

GraphRecipe ExperimentConfig::recipe(GraphKind kind) const {
    GraphRecipe r;
    r.kind = kind;
    r.k = k;
    r.eps = eps;
    r.sigma = sigma;
    r.weights = weights;
    r.stat = stat;
    r.scheme = schemes.empty() ? DegreeScheme::quadratic(k) : schemes.front();
    r.scheme.k = k;
    r.ustat_b = ustat_b;
    return r;
}

void ExperimentConfig::validate() const {
    if (graphs.empty()) throw ConfigError("config needs at least one graph kind");
    if (seeds.empty()) throw ConfigError("config needs at least one seed");
    if (k < 1) throw ConfigError("config: k must be positive");
    if (dataset.type == "csv" && !fs::exists(dataset.csv_path))
        throw ConfigError("config: csv file '" + dataset.csv_path + "' does not exist");
    for (const auto& v : variants) {
        if (v.type == "csv" && !fs::exists(v.csv_path))
            throw ConfigError("config: csv file '" + v.csv_path + "' does not exist");
    }
    if (std::find(graphs.begin(), graphs.end(), GraphKind::rmd) != graphs.end() && schemes.empty())
        throw ConfigError("config: rmd graphs need at least one scheme");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.name = j.value("name", "experiment");
    if (!j.contains("dataset")) throw ConfigError("config needs a 'dataset' section");
    cfg.dataset = dataset_from_json(j["dataset"]);
    if (j.contains("variants")) {
        for (const auto& vj : j["variants"]) {
            json merged = j["dataset"];
            merged.update(vj.contains("dataset") ? vj["dataset"] : vj);
            merged.erase("tag");
            cfg.variants.push_back(dataset_from_json(merged));
            cfg.variant_tags.push_back(vj.value("tag", "variant" + std::to_string(cfg.variants.size())));
        }
    }
    cfg.k = j.value("k", 30);
    if (j.contains("statistic")) cfg.stat = stat_from_json(j["statistic"]);
    cfg.ustat_b = j.value("ustat_b", 10);
    if (j.contains("schemes")) {
        for (const auto& sj : j["schemes"]) cfg.schemes.push_back(scheme_from_json(sj, cfg.k));
    } else {
        cfg.schemes = {DegreeScheme::linear(cfg.k), DegreeScheme::quadratic(cfg.k),
                       DegreeScheme::cubic(cfg.k)};
    }
    if (j.contains("graphs")) {
        for (const auto& gj : j["graphs"]) {
            try {
                cfg.graphs.push_back(graph_kind_from_string(gj.get<std::string>()));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
    }
    const std::string weights = j.value("weights", "binary");
    if (weights == "binary") cfg.weights = WeightKind::binary;
    else if (weights == "rbf") cfg.weights = WeightKind::rbf;
    else throw ConfigError("unknown weights '" + weights + "'");
    cfg.sigma = j.value("sigma", 0.0);
    cfg.eps = j.value("eps", 0.0);

    if (j.contains("algorithm")) {
        const auto& aj = j["algorithm"];
        const std::string name = aj.value("name", "sc");
        if (name == "divisive") {
            cfg.algo.algo = Algo::sc;
            cfg.algo.divisive = true;
        } else {
            try {
                cfg.algo.algo = algo_from_string(name);
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
        cfg.algo.clusters = aj.value("clusters", 2);
        cfg.algo.normalized = aj.value("normalized", false);
        cfg.algo.num_labeled = aj.value("num_labeled", 20);
        cfg.algo.mu = aj.value("mu", 0.05);
        cfg.algo.tol = aj.value("tol", 1e-10);
    }
    cfg.min_cluster_fraction = j.value("min_cluster_fraction", 0.05);
    if (j.contains("seeds")) {
        cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    } else if (j.contains("num_seeds")) {
        for (int s = 1; s <= j["num_seeds"].get<int>(); ++s) cfg.seeds.push_back(s);
    }
    cfg.out_dir = j.value("out", "results");
    cfg.threads = j.value("threads", 1);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

struct SingleRun {
    RunResult selected;
    std::vector<RunResult> candidates;
};

SingleRun execute_run(const ExperimentConfig& cfg, const DatasetSource& src, GraphKind kind,
                      std::uint64_t seed) {
    const DataSet ds = src.realize(seed);
    if (!ds.has_labels()) throw std::runtime_error("experiment dataset has no ground-truth labels");

    LabeledSplit split;
    std::vector<int> known;
    if (cfg.algo.algo != Algo::sc) {
        split = make_labeled_split(ds, cfg.algo.num_labeled, seed ^ 0x5b5b5b5bULL);
        for (int id : split.labeled) known.push_back(ds.labels[id]);
    }

    SingleRun out;
    auto make_result = [&](const Partition& p, const std::optional<Labeling>& lab,
                           const CutReport& rep, const std::string& scheme_name, bool selected) {
        RunResult r;
        r.graph = to_string(kind);
        r.scheme = scheme_name;
        r.seed = seed;
        r.report = rep;
        r.selected = selected;
        if (lab.has_value()) {
            r.error = ssl_error_rate(*lab, ds.labels, split);
        } else {
            r.error = error_rate(p, ds.labels);
        }
        return r;
    };

    if (kind == GraphKind::rmd) {
        CvConfig cv;
        cv.schemes = cfg.schemes;
        cv.min_cluster_fraction = cfg.min_cluster_fraction;
        cv.recipe = cfg.recipe(kind);
        cv.clusters = cfg.algo.clusters;
        cv.normalized = cfg.algo.normalized;
        const CvOutcome outcome =
            cross_validate(ds, cv, cfg.algo.algo, seed,
                           cfg.algo.algo == Algo::sc ? nullptr : &split,
                           cfg.algo.algo == Algo::sc ? nullptr : &known);
        for (const auto& cand : outcome.candidates) {
            RunResult r =
                make_result(cand.partition, cand.labeling, cand.report, cand.scheme.name(),
                            cand.selected);
            out.candidates.push_back(r);
            if (cand.selected) out.selected = r;
        }
        return out;
    }

    const GraphRecipe recipe = cfg.recipe(kind);
    const SparseGraph g = recipe.build(ds, seed);
    Partition p;
    std::optional<Labeling> lab;
    switch (cfg.algo.algo) {
        case Algo::sc:
            if (cfg.algo.divisive) {
                p = divisive_cluster(ds, cfg.algo.clusters, recipe, seed);
            } else {
                p = spectral_clustering(g, cfg.algo.clusters, cfg.algo.normalized, seed);
            }
            break;
        case Algo::grf:
            lab = grf(g, split, known, cfg.algo.tol);
            p = Partition::from_labels(lab->hard);
            break;
        case Algo::gtam:
            lab = gtam(g, split, known, cfg.algo.mu);
            p = Partition::from_labels(lab->hard);
            break;
    }
    const CutReport rep = cut_metrics(g, p);
    out.selected = make_result(p, lab, rep, to_string(kind), true);
    out.candidates.push_back(out.selected);
    return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentSummary summary;

    std::vector<std::pair<const DatasetSource*, std::string>> variants;
    if (cfg.variants.empty()) {
        variants.emplace_back(&cfg.dataset, "");
    } else {
        for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
            variants.emplace_back(&cfg.variants[v], cfg.variant_tags[v]);
        }
    }

    const fs::path root = fs::path(cfg.out_dir) / cfg.name;
    fs::create_directories(root);
    json manifest;
    manifest["name"] = cfg.name;
    manifest["artifacts"] = json::array();
    manifest["failures"] = json::array();
    const std::string algo_name = cfg.algo.divisive ? "divisive" : to_string(cfg.algo.algo);

    for (const auto& [src, tag] : variants) {
        const fs::path vroot = tag.empty() ? root : root / tag;
        struct Cell {
            SingleRun run;
            bool failed = false;
            std::string message;
        };
        std::vector<Cell> cells(cfg.graphs.size() * cfg.seeds.size());

        parallel_for(cells.size(), cfg.threads, [&](std::size_t idx) {
            const GraphKind kind = cfg.graphs[idx / cfg.seeds.size()];
            const std::uint64_t seed = cfg.seeds[idx % cfg.seeds.size()];
            try {
                cells[idx].run = execute_run(cfg, *src, kind, seed);
            } catch (const std::exception& e) {
                cells[idx].failed = true;
                cells[idx].message = e.what();
            }
        });

        fs::create_directories(vroot);
        const fs::path agg_path = vroot / "aggregate.csv";
        std::ofstream agg(agg_path);
        agg << "graph,runs,mean_error,std_error,mean_cut,mean_ratio_cut,mean_ncut\n";
        agg.precision(10);

        for (std::size_t gi = 0; gi < cfg.graphs.size(); ++gi) {
            const std::string kind_name = to_string(cfg.graphs[gi]);
            const fs::path kind_dir = vroot / kind_name;
            fs::create_directories(kind_dir);
            std::vector<double> errors, cuts, rcuts, ncuts;
            for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
                Cell& cell = cells[gi * cfg.seeds.size() + si];
                if (cell.failed) {
                    json fail;
                    fail["graph"] = kind_name;
                    fail["seed"] = cfg.seeds[si];
                    fail["error"] = cell.message;
                    manifest["failures"].push_back(fail);
                    ++summary.failures;
                    continue;
                }
                const fs::path run_path = kind_dir / ("seed" + std::to_string(cfg.seeds[si]) + ".json");
                json run_json = result_to_json(cell.run.selected, algo_name);
                json cand = json::array();
                for (const auto& c : cell.run.candidates) cand.push_back(result_to_json(c, algo_name));
                run_json["candidates"] = cand;
                std::ofstream rf(run_path);
                rf << run_json.dump(2) << '\n';
                manifest["artifacts"].push_back(run_path.string());
                summary.artifacts.push_back(run_path.string());
                summary.runs.push_back(cell.run.selected);
                errors.push_back(cell.run.selected.error);
                cuts.push_back(cell.run.selected.report.cut);
                rcuts.push_back(cell.run.selected.report.ratio_cut);
                ncuts.push_back(cell.run.selected.report.ncut);
            }
            auto mean = [](const std::vector<double>& v) {
                return v.empty() ? 0.0
                                 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            };
            auto stddev = [&](const std::vector<double>& v) {
                if (v.size() < 2) return 0.0;
                const double m = mean(v);
                double s = 0.0;
                for (double x : v) s += (x - m) * (x - m);
                return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
            };
            agg << kind_name << ',' << errors.size() << ',' << mean(errors) << ','
                << stddev(errors) << ',' << mean(cuts) << ',' << mean(rcuts) << ','
                << mean(ncuts) << '\n';
        }
        agg.close();
        manifest["artifacts"].push_back(agg_path.string());
        summary.artifacts.push_back(agg_path.string());
    }

    const fs::path manifest_path = root / "manifest.json";
    {
        std::ofstream mf(manifest_path);
        mf << manifest.dump(2) << '\n';
    }
    summary.artifacts.push_back(manifest_path.string());
    if (summary.failures > 0) {
        throw std::runtime_error(std::to_string(summary.failures) +
                                 " runs failed; partial results and manifest are in " + root.string());
    }
    return summary;
}

std::vector<std::string> emit_curves(const ExperimentConfig& cfg, const std::string& kind) {
    cfg.validate();
    const fs::path root = fs::path(cfg.out_dir) / cfg.name / "curves";
    fs::create_directories(root);
    const std::uint64_t seed = cfg.seeds.front();
    const DataSet ds = cfg.dataset.realize(seed);
    std::vector<std::string> written;

    if (kind == "cut_sweep") {
        for (GraphKind gk : cfg.graphs) {
            const SparseGraph g = cfg.recipe(gk).build(ds, seed);
            const CutCurve curve = hyperplane_sweep(g, ds, 0, 100);
            const fs::path path = root / (to_string(gk) + "_cut_sweep.csv");
            save_curve_csv(curve, path.string());
            written.push_back(path.string());
        }
    } else if (kind == "rank_profile") {
        const RankVector ranks = rank_ustat(ds, cfg.stat, cfg.ustat_b, seed);
        const fs::path path = root / "rank_profile.csv";
        std::ofstream out(path);
        out.precision(17);
        out << "x0,rank\n";
        for (int i = 0; i < ds.n; ++i) out << ds.coord(i, 0) << ',' << ranks.values[i] << '\n';
        written.push_back(path.string());
    } else {
        throw ConfigError("emit_curves: kind must be cut_sweep or rank_profile");
    }
    return written;
}

}  // namespace rmd
