#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmd/bmatching.hpp"
#include "rmd/experiment.hpp"

namespace py = pybind11;
using namespace rmd;

namespace {

DataSet dataset_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> points,
                           std::optional<std::vector<int>> labels) {
    if (points.ndim() != 2) throw std::invalid_argument("points must be a 2d array");
    DataSet ds;
    ds.n = static_cast<int>(points.shape(0));
    ds.dim = static_cast<int>(points.shape(1));
    ds.points.assign(points.data(), points.data() + ds.n * ds.dim);
    if (labels.has_value()) {
        if (static_cast<int>(labels->size()) != ds.n)
            throw std::invalid_argument("labels must have one entry per point");
        ds.labels = *labels;
        int c = 0;
        for (int l : ds.labels) c = std::max(c, l + 1);
        for (int i = 0; i < c; ++i) ds.label_names.push_back(std::to_string(i));
    }
    ds.validate();
    return ds;
}

py::array_t<double> points_array(const DataSet& ds) {
    py::array_t<double> arr({ds.n, ds.dim});
    std::copy(ds.points.begin(), ds.points.end(), arr.mutable_data());
    return arr;
}

MixtureSpec mixture_from_components(
    const std::vector<std::tuple<double, std::vector<double>,
                                 py::array_t<double, py::array::c_style | py::array::forcecast>>>&
        comps) {
    MixtureSpec spec;
    for (const auto& [weight, mean, cov] : comps) {
        GaussianComponent c;
        c.weight = weight;
        c.mean = mean;
        if (cov.ndim() == 1) {
            const int d = static_cast<int>(cov.shape(0));
            c.cov.assign(static_cast<std::size_t>(d) * d, 0.0);
            for (int a = 0; a < d; ++a) c.cov[static_cast<std::size_t>(a) * d + a] = cov.at(a);
        } else if (cov.ndim() == 2) {
            const int d = static_cast<int>(cov.shape(0));
            c.cov.assign(cov.data(), cov.data() + d * d);
        } else {
            throw std::invalid_argument("cov must be a vector (diagonal) or a square matrix");
        }
        spec.components.push_back(std::move(c));
    }
    spec.validate();
    return spec;
}

py::array_t<double> dense_laplacian(const SparseGraph& g, bool normalized) {
    const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian(g, normalized));
    py::array_t<double> arr({g.n, g.n});
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) arr.mutable_at(i, j) = L(i, j);
    }
    return arr;
}

py::array_t<double> scores_array(const Labeling& lab) {
    const int n = static_cast<int>(lab.hard.size());
    py::array_t<double> arr({n, lab.num_classes});
    std::copy(lab.scores.begin(), lab.scores.end(), arr.mutable_data());
    return arr;
}

}  // namespace

PYBIND11_MODULE(_rmdgraph, m) {
    m.doc() = "Rank-modulated degree graphs: density-adaptive graph construction, "
              "spectral clustering and graph transduction";

    py::class_<DataSet>(m, "DataSet")
        .def(py::init(&dataset_from_array), py::arg("points"), py::arg("labels") = py::none())
        .def_property_readonly("points", &points_array)
        .def_readonly("labels", &DataSet::labels)
        .def_readonly("n", &DataSet::n)
        .def_readonly("dim", &DataSet::dim)
        .def("num_classes", &DataSet::num_classes)
        .def("subset", &DataSet::subset);

    py::class_<MixtureSpec>(m, "MixtureSpec")
        .def(py::init(&mixture_from_components), py::arg("components"),
             "components: list of (weight, mean, cov) tuples; cov may be a diagonal vector")
        .def("density",
             [](const MixtureSpec& s, const std::vector<double>& x) { return s.density(x); })
        .def("side_mass", &MixtureSpec::side_mass, py::arg("axis"), py::arg("t"))
        .def_property_readonly("dim", &MixtureSpec::dim);

    py::class_<LabeledSplit>(m, "LabeledSplit")
        .def_readonly("labeled", &LabeledSplit::labeled)
        .def_readonly("unlabeled", &LabeledSplit::unlabeled);

    m.def("gen_mixture", &gen_mixture, py::arg("spec"), py::arg("n"), py::arg("seed"));
    m.def(
        "gen_banana_scene",
        [](const std::array<int, 3>& counts, const std::vector<std::array<double, 2>>& outliers,
           std::uint64_t seed) { return gen_banana_scene(counts, outliers, seed); },
        py::arg("counts"), py::arg("outliers"), py::arg("seed"));
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_column") = "");
    m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));
    m.def("subsample_unbalanced", &subsample_unbalanced, py::arg("dataset"), py::arg("per_class"),
          py::arg("seed"));
    m.def("make_labeled_split", &make_labeled_split, py::arg("dataset"), py::arg("num_labeled"),
          py::arg("seed"));

    py::enum_<StatKind>(m, "StatKind")
        .value("eps_count", StatKind::eps_count)
        .value("lnn_distance", StatKind::lnn_distance)
        .value("avg_lnn_distance", StatKind::avg_lnn_distance);

    py::class_<StatisticSpec>(m, "StatisticSpec")
        .def(py::init([](StatKind kind, double eps, int l, bool weighted) {
                 StatisticSpec s;
                 s.kind = kind;
                 s.eps = eps;
                 s.l = l;
                 s.weighted = weighted;
                 return s;
             }),
             py::arg("kind") = StatKind::avg_lnn_distance, py::arg("eps") = 1.0, py::arg("l") = 50,
             py::arg("weighted") = false)
        .def_readwrite("kind", &StatisticSpec::kind)
        .def_readwrite("eps", &StatisticSpec::eps)
        .def_readwrite("l", &StatisticSpec::l)
        .def_readwrite("weighted", &StatisticSpec::weighted);

    py::class_<RankVector>(m, "RankVector")
        .def_readonly("values", &RankVector::values)
        .def_readonly("resampled", &RankVector::resampled)
        .def_readonly("b", &RankVector::b);

    m.def(
        "statistic",
        [](const std::vector<double>& u, const DataSet& refset, const StatisticSpec& spec,
           int self_index) { return statistic(u, refset, spec, self_index); },
        py::arg("u"), py::arg("refset"), py::arg("spec"), py::arg("self_index") = -1);
    m.def("rank_all", &rank_all, py::arg("dataset"), py::arg("spec"));
    m.def("rank_ustat", &rank_ustat, py::arg("dataset"), py::arg("spec"), py::arg("b"),
          py::arg("seed"));
    m.def(
        "pvalue_oracle",
        [](const std::vector<double>& u, const MixtureSpec& spec, int mc_samples,
           std::uint64_t seed) { return pvalue_oracle(u, spec, mc_samples, seed); },
        py::arg("u"), py::arg("spec"), py::arg("mc_samples") = kDefaultPValueSamples,
        py::arg("seed") = 12345);
    m.def("save_rank_csv", &save_rank_csv, py::arg("ranks"), py::arg("path"));

    py::enum_<WeightKind>(m, "WeightKind")
        .value("binary", WeightKind::binary)
        .value("rbf", WeightKind::rbf);

    py::class_<SparseGraph>(m, "SparseGraph")
        .def_readonly("n", &SparseGraph::n)
        .def_readonly("sigma", &SparseGraph::sigma)
        .def_readonly("weight_kind", &SparseGraph::weight_kind)
        .def("num_edges", &SparseGraph::num_edges)
        .def("degree", &SparseGraph::degree)
        .def("volume", &SparseGraph::volume)
        .def("total_weight", &SparseGraph::total_weight)
        .def("has_edge", &SparseGraph::has_edge)
        .def("edges",
             [](const SparseGraph& g) {
                 std::vector<std::tuple<int, int, double>> out;
                 for (int i = 0; i < g.n; ++i) {
                     for (const auto& [j, w] : g.adj[i]) {
                         if (j > i) out.emplace_back(i, j, w);
                     }
                 }
                 return out;
             })
        .def("components", &SparseGraph::components);

    py::enum_<PhiKind>(m, "PhiKind")
        .value("linear", PhiKind::linear)
        .value("quadratic", PhiKind::quadratic)
        .value("cubic", PhiKind::cubic)
        .value("custom", PhiKind::custom);

    py::class_<DegreeScheme>(m, "DegreeScheme")
        .def(py::init([](int k, double lambda, PhiKind phi, double coeff,
                         std::vector<double> table) {
                 DegreeScheme s;
                 s.k = k;
                 s.lambda = lambda;
                 s.phi = phi;
                 s.coeff = coeff;
                 s.table = std::move(table);
                 s.validate();
                 return s;
             }),
             py::arg("k"), py::arg("lambda_"), py::arg("phi") = PhiKind::linear,
             py::arg("coeff") = 1.0, py::arg("table") = std::vector<double>{})
        .def_static("linear", &DegreeScheme::linear, py::arg("k"))
        .def_static("quadratic", &DegreeScheme::quadratic, py::arg("k"))
        .def_static("cubic", &DegreeScheme::cubic, py::arg("k"))
        .def("target", &DegreeScheme::target, py::arg("rank"))
        .def("phi_value", &DegreeScheme::phi_value, py::arg("rank"))
        .def_property_readonly("name", &DegreeScheme::name)
        .def_readwrite("k", &DegreeScheme::k)
        .def_readonly("lambda_", &DegreeScheme::lambda)
        .def_readonly("coeff", &DegreeScheme::coeff);

    py::class_<DegreeProfile>(m, "DegreeProfile")
        .def_readonly("degrees", &DegreeProfile::degrees);

    m.def("knn_graph", &knn_graph, py::arg("dataset"), py::arg("k"));
    m.def("eps_graph", &eps_graph, py::arg("dataset"), py::arg("eps"));
    m.def("full_rbf_graph", &full_rbf_graph, py::arg("dataset"), py::arg("sigma"));
    m.def("degree_profile", &degree_profile, py::arg("ranks"), py::arg("scheme"));
    m.def("rmd_graph_nn", &rmd_graph_nn, py::arg("dataset"), py::arg("profile"));
    m.def(
        "rmd_graph_opt",
        [](const DataSet& ds, const DegreeProfile& p, int max_iters) {
            return rmd_graph_opt(ds, p, max_iters);
        },
        py::arg("dataset"), py::arg("profile"), py::arg("max_iters") = 1000);
    m.def(
        "bmatching_graph",
        [](const DataSet& ds, int b, int max_iters) { return bmatching_graph(ds, b, max_iters); },
        py::arg("dataset"), py::arg("b"), py::arg("max_iters") = 1000);
    m.def("apply_weights", &apply_weights, py::arg("graph"), py::arg("kind"), py::arg("dataset"),
          py::arg("sigma") = 0.0);
    m.def("average_knn_distance", &average_knn_distance, py::arg("dataset"), py::arg("k"));
    m.def("laplacian", &dense_laplacian, py::arg("graph"), py::arg("normalized") = false);
    m.def("save_edge_csv", &save_edge_csv, py::arg("graph"), py::arg("path"));
    m.def("load_edge_csv", &load_edge_csv, py::arg("path"));

    py::class_<Partition>(m, "Partition")
        .def(py::init([](std::vector<int> assignment) {
                 Partition p = Partition::from_labels(assignment);
                 return p;
             }),
             py::arg("assignment"))
        .def_readonly("assignment", &Partition::assignment)
        .def_readonly("num_clusters", &Partition::num_clusters);

    py::class_<CutReport>(m, "CutReport")
        .def_readonly("cut", &CutReport::cut)
        .def_readonly("ratio_cut", &CutReport::ratio_cut)
        .def_readonly("ncut", &CutReport::ncut)
        .def_readonly("cluster_sizes", &CutReport::cluster_sizes)
        .def_readonly("cluster_volumes", &CutReport::cluster_volumes);

    py::enum_<CutMetric>(m, "CutMetric")
        .value("cut", CutMetric::cut)
        .value("ratio_cut", CutMetric::ratio_cut)
        .value("ncut", CutMetric::ncut);

    py::class_<CutCurve>(m, "CutCurve")
        .def_readonly("axis", &CutCurve::axis)
        .def_readonly("thresholds", &CutCurve::thresholds)
        .def_readonly("values", &CutCurve::values)
        .def("argmin", &CutCurve::argmin, py::arg("metric"), py::arg("min_side") = 1);

    m.def("cut_metrics", &cut_metrics, py::arg("graph"), py::arg("partition"));
    m.def("hyperplane_sweep", &hyperplane_sweep, py::arg("graph"), py::arg("dataset"),
          py::arg("axis"), py::arg("grid"));
    m.def("unit_ball_volume", &unit_ball_volume, py::arg("d"));
    m.def("limit_cut_constant", &limit_cut_constant, py::arg("d"));
    m.def("limit_ncut_knn", &limit_ncut_knn, py::arg("spec"), py::arg("axis"), py::arg("t"),
          py::arg("balance") = true);
    m.def("limit_ncut_rmd", &limit_ncut_rmd, py::arg("spec"), py::arg("axis"), py::arg("t"),
          py::arg("scheme"), py::arg("pvalue_samples") = kDefaultPValueSamples,
          py::arg("pvalue_seed") = 12345);
    m.def("save_curve_csv", &save_curve_csv, py::arg("curve"), py::arg("path"));

    py::class_<Labeling>(m, "Labeling")
        .def_property_readonly("scores", &scores_array)
        .def_readonly("hard", &Labeling::hard)
        .def_readonly("num_classes", &Labeling::num_classes)
        .def_readonly("uniform_fallback", &Labeling::uniform_fallback);

    m.def("spectral_clustering", &spectral_clustering, py::arg("graph"), py::arg("c"),
          py::arg("normalized") = false, py::arg("seed") = 0);
    m.def("grf", &grf, py::arg("graph"), py::arg("split"), py::arg("labels"),
          py::arg("tol") = 1e-10, py::arg("cg_threshold") = 200);
    m.def("gtam", &gtam, py::arg("graph"), py::arg("split"), py::arg("labels"),
          py::arg("mu") = 0.05, py::arg("max_iters") = -1, py::arg("seed") = 0);

    py::enum_<GraphKind>(m, "GraphKind")
        .value("knn", GraphKind::knn)
        .value("eps", GraphKind::eps)
        .value("full_rbf", GraphKind::full_rbf)
        .value("bmatch", GraphKind::bmatch)
        .value("rmd", GraphKind::rmd);

    py::class_<GraphRecipe>(m, "GraphRecipe")
        .def(py::init<>())
        .def_readwrite("kind", &GraphRecipe::kind)
        .def_readwrite("k", &GraphRecipe::k)
        .def_readwrite("eps", &GraphRecipe::eps)
        .def_readwrite("sigma", &GraphRecipe::sigma)
        .def_readwrite("weights", &GraphRecipe::weights)
        .def_readwrite("stat", &GraphRecipe::stat)
        .def_readwrite("scheme", &GraphRecipe::scheme)
        .def_readwrite("ustat_b", &GraphRecipe::ustat_b)
        .def("build", &GraphRecipe::build, py::arg("dataset"), py::arg("seed"));

    py::class_<SplitRecord>(m, "SplitRecord")
        .def_readonly("part", &SplitRecord::part)
        .def_readonly("left", &SplitRecord::left)
        .def_readonly("right", &SplitRecord::right)
        .def_readonly("ratio_cut", &SplitRecord::ratio_cut);

    m.def(
        "divisive_cluster",
        [](const DataSet& ds, int target_c, const GraphRecipe& recipe, std::uint64_t seed,
           int min_part, bool want_trace) {
            std::vector<SplitRecord> trace;
            Partition p = divisive_cluster(ds, target_c, recipe, seed, min_part,
                                           want_trace ? &trace : nullptr);
            return py::make_tuple(p, trace);
        },
        py::arg("dataset"), py::arg("target_c"), py::arg("recipe"), py::arg("seed"),
        py::arg("min_part") = 2, py::arg("trace") = false);

    py::enum_<Algo>(m, "Algo")
        .value("sc", Algo::sc)
        .value("grf", Algo::grf)
        .value("gtam", Algo::gtam);

    py::class_<CvConfig>(m, "CvConfig")
        .def(py::init<>())
        .def_readwrite("schemes", &CvConfig::schemes)
        .def_readwrite("min_cluster_fraction", &CvConfig::min_cluster_fraction)
        .def_readwrite("recipe", &CvConfig::recipe)
        .def_readwrite("clusters", &CvConfig::clusters)
        .def_readwrite("normalized", &CvConfig::normalized);

    py::class_<CvCandidate>(m, "CvCandidate")
        .def_readonly("scheme", &CvCandidate::scheme)
        .def_readonly("partition", &CvCandidate::partition)
        .def_readonly("labeling", &CvCandidate::labeling)
        .def_readonly("report", &CvCandidate::report)
        .def_readonly("discarded", &CvCandidate::discarded)
        .def_readonly("selected", &CvCandidate::selected);

    py::class_<CvOutcome>(m, "CvOutcome")
        .def_readonly("candidates", &CvOutcome::candidates)
        .def_readonly("selected", &CvOutcome::selected)
        .def_readonly("all_discarded", &CvOutcome::all_discarded)
        .def("best", &CvOutcome::best, py::return_value_policy::copy);

    m.def(
        "cross_validate",
        [](const DataSet& ds, const CvConfig& cfg, Algo algo, std::uint64_t seed,
           std::optional<LabeledSplit> split, std::optional<std::vector<int>> labels) {
            return cross_validate(ds, cfg, algo, seed, split ? &*split : nullptr,
                                  labels ? &*labels : nullptr);
        },
        py::arg("dataset"), py::arg("config"), py::arg("algo"), py::arg("seed"),
        py::arg("split") = py::none(), py::arg("labels") = py::none());

    m.def("error_rate", &error_rate, py::arg("partition"), py::arg("truth"));
    m.def("ssl_error_rate", &ssl_error_rate, py::arg("labeling"), py::arg("truth"),
          py::arg("split"));

    m.def(
        "run_experiment_file",
        [](const std::string& path) {
            const ExperimentSummary s = run_experiment(load_config(path));
            return s.artifacts;
        },
        py::arg("config_path"));
    m.def(
        "run_experiment_json",
        [](const std::string& text) {
            const ExperimentSummary s = run_experiment(parse_config(text));
            return s.artifacts;
        },
        py::arg("config_json"));
    m.def(
        "emit_curves_file",
        [](const std::string& path, const std::string& kind) {
            return emit_curves(load_config(path), kind);
        },
        py::arg("config_path"), py::arg("kind"));
}
