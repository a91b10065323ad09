#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "rmd/bmatching.hpp"
#include "rmd/learn.hpp"

using namespace rmd;

namespace {

SparseGraph two_cliques(int half) {
    SparseGraph g(2 * half);
    for (int base : {0, half}) {
        for (int i = 0; i < half; ++i) {
            for (int j = i + 1; j < half; ++j) g.add_edge(base + i, base + j, 1.0);
        }
    }
    g.finalize();
    return g;
}

MixtureSpec fig1_spec() {
    MixtureSpec spec;
    spec.components.push_back({0.85, {4.5, 0.0}, {2.0, 0.0, 0.0, 1.0}});
    spec.components.push_back({0.15, {-0.5, 0.0}, {1.0, 0.0, 0.0, 1.0}});
    return spec;
}

GraphRecipe default_rmd_recipe(int k) {
    GraphRecipe r;
    r.kind = GraphKind::rmd;
    r.k = k;
    r.scheme = DegreeScheme::quadratic(k);
    r.stat.l = 50;
    r.ustat_b = 10;
    return r;
}

}  // namespace

TEST_CASE("spectral clustering recovers disconnected cliques") {
    const SparseGraph g = two_cliques(8);
    const Partition p = spectral_clustering(g, 2, false, 3);
    const CutReport rep = cut_metrics(g, p);
    CHECK(rep.cut == 0.0);
    for (int i = 1; i < 8; ++i) CHECK(p.assignment[i] == p.assignment[0]);
    for (int i = 9; i < 16; ++i) CHECK(p.assignment[i] == p.assignment[8]);
    CHECK(p.assignment[0] != p.assignment[8]);

    const Partition q = spectral_clustering(g, 2, true, 3);
    CHECK(cut_metrics(g, q).cut == 0.0);
}

TEST_CASE("spectral clustering is deterministic in the seed") {
    MixtureSpec spec = fig1_spec();
    const DataSet ds = gen_mixture(spec, 150, 4);
    const SparseGraph g = knn_graph(ds, 8);
    const Partition a = spectral_clustering(g, 2, false, 42);
    const Partition b = spectral_clustering(g, 2, false, 42);
    CHECK(a.assignment == b.assignment);
    CHECK_THROWS_AS(spectral_clustering(g, ds.n + 1, false, 1), std::invalid_argument);
}

TEST_CASE("grf path graph midpoint") {
    SparseGraph g(3);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 1.0);
    LabeledSplit split;
    split.labeled = {0, 2};
    split.unlabeled = {1};
    const Labeling lab = grf(g, split, {0, 1});
    CHECK(lab.score(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lab.score(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lab.score(0, 0) == 1.0);
    CHECK(lab.score(2, 1) == 1.0);
}

TEST_CASE("grf with everything labeled returns the labels") {
    const SparseGraph g = two_cliques(3);
    LabeledSplit split;
    for (int i = 0; i < 6; ++i) split.labeled.push_back(i);
    const std::vector<int> labels{0, 0, 0, 1, 1, 1};
    const Labeling lab = grf(g, split, labels);
    CHECK(lab.hard == labels);
}

TEST_CASE("grf matches a dense solve and keeps the maximum principle") {
    Rng rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12 + static_cast<int>(rng.below(30));
        SparseGraph g(n);
        // Random connected-ish graph: a ring plus random chords.
        for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 0.2 + rng.uniform());
        for (int extra = 0; extra < n; ++extra) {
            const int a = static_cast<int>(rng.below(n));
            const int b = static_cast<int>(rng.below(n));
            if (a != b && !g.has_edge(a, b)) g.add_edge(a, b, 0.2 + rng.uniform());
        }
        g.finalize();

        LabeledSplit split;
        std::vector<int> labels;
        std::vector<char> is_labeled(n, 0);
        const int n_labeled = 2 + static_cast<int>(rng.below(4));
        for (int a = 0; a < n_labeled; ++a) {
            int id = static_cast<int>(rng.below(n));
            while (is_labeled[id]) id = (id + 1) % n;
            is_labeled[id] = 1;
            split.labeled.push_back(id);
            labels.push_back(a == 0 ? 0 : static_cast<int>(rng.below(2)));
        }
        for (int i = 0; i < n; ++i) {
            if (!is_labeled[i]) split.unlabeled.push_back(i);
        }

        const Labeling lab = grf(g, split, labels);

        // Dense oracle: assemble L, solve the unlabeled block directly.
        const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian(g, false));
        const int nu = static_cast<int>(split.unlabeled.size());
        const int c = lab.num_classes;
        Eigen::MatrixXd Luu(nu, nu);
        for (int a = 0; a < nu; ++a) {
            for (int b = 0; b < nu; ++b) Luu(a, b) = L(split.unlabeled[a], split.unlabeled[b]);
        }
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nu, c);
        for (int a = 0; a < nu; ++a) {
            for (std::size_t l = 0; l < split.labeled.size(); ++l) {
                rhs(a, labels[l]) -= L(split.unlabeled[a], split.labeled[l]);
            }
        }
        const Eigen::MatrixXd Fu = Eigen::FullPivLU<Eigen::MatrixXd>(Luu).solve(rhs);
        for (int a = 0; a < nu; ++a) {
            double row_sum = 0.0;
            for (int j = 0; j < c; ++j) {
                CHECK(lab.score(split.unlabeled[a], j) == doctest::Approx(Fu(a, j)).epsilon(1e-8));
                CHECK(lab.score(split.unlabeled[a], j) >= -1e-9);
                CHECK(lab.score(split.unlabeled[a], j) <= 1.0 + 1e-9);
                row_sum += lab.score(split.unlabeled[a], j);
            }
            CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("grf flags unreachable nodes with uniform scores") {
    SparseGraph g(4);
    g.add_edge(0, 1, 1.0);
    g.add_edge(2, 3, 1.0);  // no labels in this component
    LabeledSplit split;
    split.labeled = {0};
    split.unlabeled = {1, 2, 3};
    const Labeling lab = grf(g, split, {1});
    CHECK(lab.uniform_fallback == std::vector<int>{2, 3});
    CHECK(lab.score(2, 0) == doctest::Approx(0.5));
    CHECK(lab.score(2, 1) == doctest::Approx(0.5));
}

TEST_CASE("gtam labels everything and respects components") {
    const SparseGraph g = two_cliques(6);
    LabeledSplit split;
    split.labeled = {0, 6};
    for (int i = 0; i < 12; ++i) {
        if (i != 0 && i != 6) split.unlabeled.push_back(i);
    }
    const Labeling lab = gtam(g, split, {0, 1}, 0.05);
    for (int i = 0; i < 6; ++i) CHECK(lab.hard[i] == 0);
    for (int i = 6; i < 12; ++i) CHECK(lab.hard[i] == 1);
}

TEST_CASE("gtam with all points labeled is the identity") {
    const SparseGraph g = two_cliques(3);
    LabeledSplit split;
    for (int i = 0; i < 6; ++i) split.labeled.push_back(i);
    const std::vector<int> labels{0, 1, 0, 1, 0, 1};
    const Labeling lab = gtam(g, split, labels, 0.05);
    CHECK(lab.hard == labels);
}

TEST_CASE("gtam on the unbalanced mixture: modulated graph beats knn") {
    MixtureSpec spec = fig1_spec();
    const int k = 30;
    double knn_sum = 0.0, rmd_sum = 0.0;
    StatisticSpec stat;
    stat.l = 50;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const DataSet ds = gen_mixture(spec, 500, seed);
        const LabeledSplit split = make_labeled_split(ds, 20, seed + 1000);
        std::vector<int> known;
        for (int id : split.labeled) known.push_back(ds.labels[id]);

        const SparseGraph g_knn = knn_graph(ds, k);
        knn_sum += ssl_error_rate(gtam(g_knn, split, known, 0.05), ds.labels, split);

        const RankVector ranks = rank_ustat(ds, stat, 10, seed);
        const SparseGraph g_rmd = rmd_graph_nn(ds, degree_profile(ranks, DegreeScheme::quadratic(k)));
        rmd_sum += ssl_error_rate(gtam(g_rmd, split, known, 0.05), ds.labels, split);
    }
    CHECK(rmd_sum / 20.0 < knn_sum / 20.0);
}

TEST_CASE("error_rate handles permutations and mismatches") {
    Partition pred;
    pred.assignment = {0, 0, 1, 1};
    pred.num_clusters = 2;
    CHECK(error_rate(pred, {0, 0, 1, 1}) == doctest::Approx(0.0));
    CHECK(error_rate(pred, {1, 1, 0, 0}) == doctest::Approx(0.0));  // complement

    Partition off;
    off.assignment = {0, 1, 1, 1};
    off.num_clusters = 2;
    CHECK(error_rate(off, {0, 0, 1, 1}) == doctest::Approx(0.25));

    CHECK_THROWS_AS(error_rate(off, {0, 0, 1}), std::invalid_argument);

    // Relabeling the prediction never changes the score.
    Partition relabeled;
    relabeled.assignment = {1, 0, 0, 0};
    relabeled.num_clusters = 2;
    CHECK(error_rate(relabeled, {0, 0, 1, 1}) == doctest::Approx(0.25));
}

TEST_CASE("ssl error counts unlabeled points only") {
    Labeling lab;
    lab.num_classes = 2;
    lab.hard = {0, 1, 1, 0};
    LabeledSplit split;
    split.labeled = {0, 1};
    split.unlabeled = {2, 3};
    CHECK(ssl_error_rate(lab, {0, 1, 1, 1}, split) == doctest::Approx(0.5));
}

TEST_CASE("divisive clustering recovers separated blobs exactly") {
    MixtureSpec spec;
    const double far = 14.0;
    spec.components.push_back({0.3, {0.0, 0.0}, {0.3, 0.0, 0.0, 0.3}});
    spec.components.push_back({0.3, {far, 0.0}, {0.3, 0.0, 0.0, 0.3}});
    spec.components.push_back({0.2, {0.0, far}, {0.3, 0.0, 0.0, 0.3}});
    spec.components.push_back({0.2, {far, far}, {0.3, 0.0, 0.0, 0.3}});
    const DataSet ds = gen_mixture(spec, 260, 6);

    GraphRecipe recipe = default_rmd_recipe(10);
    recipe.stat.l = 8;
    std::vector<SplitRecord> trace;
    const Partition p = divisive_cluster(ds, 4, recipe, 11, 2, &trace);
    CHECK(p.num_clusters == 4);
    CHECK(error_rate(p, ds.labels) == doctest::Approx(0.0));
    CHECK(trace.size() == 3);
    for (const auto& rec : trace) CHECK(rec.ratio_cut == doctest::Approx(0.0));
}

TEST_CASE("divisive with target 2 equals one spectral call") {
    MixtureSpec spec;
    spec.components.push_back({0.5, {0.0, 0.0}, {0.4, 0.0, 0.0, 0.4}});
    spec.components.push_back({0.5, {9.0, 0.0}, {0.4, 0.0, 0.0, 0.4}});
    const DataSet ds = gen_mixture(spec, 120, 8);
    GraphRecipe recipe = default_rmd_recipe(8);
    recipe.stat.l = 10;
    const Partition p = divisive_cluster(ds, 2, recipe, 5);
    CHECK(p.num_clusters == 2);
    CHECK(error_rate(p, ds.labels) == doctest::Approx(0.0));
}

TEST_CASE("cross_validate keeps sizable clusters and picks the smallest cut") {
    MixtureSpec spec = fig1_spec();
    const DataSet ds = gen_mixture(spec, 300, 12);

    CvConfig cfg;
    cfg.schemes = {DegreeScheme::linear(20), DegreeScheme::quadratic(20), DegreeScheme::cubic(20)};
    cfg.recipe = default_rmd_recipe(20);
    cfg.min_cluster_fraction = 0.05;
    const CvOutcome outcome = cross_validate(ds, cfg, Algo::sc, 19);
    REQUIRE(outcome.selected >= 0);
    CHECK(outcome.candidates.size() == 3);
    const int min_size = static_cast<int>(std::ceil(0.05 * ds.n));
    const auto& chosen = outcome.best();
    if (!outcome.all_discarded) {
        for (int s : chosen.report.cluster_sizes) CHECK(s >= min_size);
        for (const auto& cand : outcome.candidates) {
            if (!cand.discarded) CHECK(chosen.report.cut <= cand.report.cut + 1e-12);
        }
    }

    // Single-scheme config returns that scheme unchanged.
    CvConfig single;
    single.schemes = {DegreeScheme::quadratic(20)};
    single.recipe = cfg.recipe;
    const CvOutcome one = cross_validate(ds, single, Algo::sc, 19);
    CHECK(one.candidates.size() == 1);
    CHECK(one.selected == 0);
}

TEST_CASE("cross_validate discards singleton-ish clusters") {
    // A planted far outlier pair: the quadratic scheme on tiny k isolates it,
    // making a cluster below the 5% floor that must not be selected.
    MixtureSpec spec = fig1_spec();
    DataSet ds = gen_mixture(spec, 100, 3);
    ds.points[0] = 500.0;
    ds.points[1] = 500.0;
    ds.points[2] = 500.5;
    ds.points[3] = 500.0;

    CvConfig cfg;
    cfg.schemes = {DegreeScheme::linear(6), DegreeScheme::quadratic(6)};
    cfg.recipe = default_rmd_recipe(6);
    cfg.recipe.stat.l = 6;
    cfg.min_cluster_fraction = 0.05;
    const CvOutcome outcome = cross_validate(ds, cfg, Algo::sc, 7);
    const int min_size = static_cast<int>(std::ceil(0.05 * ds.n));
    bool some_discarded = false;
    for (const auto& cand : outcome.candidates) {
        some_discarded |= cand.discarded;
    }
    if (!outcome.all_discarded) {
        for (int s : outcome.best().report.cluster_sizes) CHECK(s >= min_size);
    }
    CHECK((some_discarded || !outcome.all_discarded));
}
