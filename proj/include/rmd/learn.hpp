#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmd/cuts.hpp"
#include "rmd/dataset.hpp"
#include "rmd/graph.hpp"
#include "rmd/rank.hpp"

namespace rmd {

/// Soft scores (n x c, row-major) plus the induced hard assignment.
/// hard[i] = argmax_j scores, ties to the lowest class id.
struct Labeling {
    std::vector<double> scores;
    std::vector<int> hard;
    int num_classes = 0;
    /// Nodes that could not be reached from any labeled point and were
    /// assigned uniform scores.
    std::vector<int> uniform_fallback;

    double score(int i, int j) const { return scores[static_cast<std::size_t>(i) * num_classes + j]; }
};

/// Embed nodes with the c smallest Laplacian eigenvectors, then k-means on
/// the rows (k-means++ seeding, 20 restarts).
Partition spectral_clustering(const SparseGraph& g, int c, bool normalized, std::uint64_t seed);

/// Harmonic label propagation: solve L_uu F_u = -L_ul Y_l with labeled rows
/// clamped to one-hot. Systems at or above cg_threshold unknowns go through
/// conjugate gradients, smaller ones through a dense factorization.
Labeling grf(const SparseGraph& g, const LabeledSplit& split, const std::vector<int>& labels,
             double tol = 1e-10, int cg_threshold = 200);

/// Graph transduction via alternating minimization: closed-form
/// F = (L/mu + I)^{-1} V Y alternating with a greedy growth of the labeled
/// set, one most-confident (node, class) per iteration. max_iters < 0 runs
/// until every node is labeled.
Labeling gtam(const SparseGraph& g, const LabeledSplit& split, const std::vector<int>& labels,
              double mu = 0.05, int max_iters = -1, std::uint64_t seed = 0);

enum class GraphKind { knn, eps, full_rbf, bmatch, rmd };

GraphKind graph_kind_from_string(const std::string& s);
std::string to_string(GraphKind kind);

/// Everything needed to build one graph over a dataset (or a subset of one).
/// Parameters that do not fit a small subset shrink to match it.
struct GraphRecipe {
    GraphKind kind = GraphKind::rmd;
    int k = 30;
    double eps = 0.0;    // 0: average k-NN distance
    double sigma = 0.0;  // 0: average k-NN distance
    WeightKind weights = WeightKind::binary;
    StatisticSpec stat;
    DegreeScheme scheme = DegreeScheme::quadratic(30);
    int ustat_b = 10;
    int bmatch_max_iters = 1000;

    SparseGraph build(const DataSet& ds, std::uint64_t seed) const;
    GraphRecipe with_scheme(const DegreeScheme& s) const;
};

struct SplitRecord {
    std::vector<int> part;   // global indices of the part that was split
    std::vector<int> left;   // global indices of the two sides
    std::vector<int> right;
    double ratio_cut = 0.0;
};

/// Recursive bipartition: each round splits the part whose tentative binary
/// spectral cut has the smallest RatioCut, rebuilding graph and ranks within
/// the part. Parts smaller than 2*min_part are frozen.
Partition divisive_cluster(const DataSet& ds, int target_c, const GraphRecipe& recipe,
                           std::uint64_t seed, int min_part = 2,
                           std::vector<SplitRecord>* trace = nullptr);

enum class Algo { sc, grf, gtam };

Algo algo_from_string(const std::string& s);
std::string to_string(Algo a);

struct CvConfig {
    std::vector<DegreeScheme> schemes;
    double min_cluster_fraction = 0.05;
    GraphRecipe recipe;  // kind is forced to rmd per scheme
    int clusters = 2;    // for sc
    bool normalized = false;
};

struct CvCandidate {
    DegreeScheme scheme;
    Partition partition;
    std::optional<Labeling> labeling;
    CutReport report;
    bool discarded = false;
    bool selected = false;
};

struct CvOutcome {
    std::vector<CvCandidate> candidates;
    int selected = -1;
    bool all_discarded = false;  // fallback pick by largest minimum cluster

    const CvCandidate& best() const { return candidates[selected]; }
};

/// One run per degree scheme on its own RMD graph; results with a cluster
/// below min_cluster_fraction*n are discarded, the smallest plain Cut wins
/// among the rest.
CvOutcome cross_validate(const DataSet& ds, const CvConfig& cfg, Algo algo, std::uint64_t seed,
                         const LabeledSplit* split = nullptr,
                         const std::vector<int>* labels = nullptr);

/// Clustering error: misassignment fraction minimized over cluster-to-class
/// permutations (exhaustive up to 6 classes, greedy matching beyond).
double error_rate(const Partition& pred, const std::vector<int>& truth);

/// Transduction error: plain misclassification over the unlabeled points.
double ssl_error_rate(const Labeling& pred, const std::vector<int>& truth, const LabeledSplit& split);

}  // namespace rmd
