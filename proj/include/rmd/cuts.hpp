#pragma once

#include <string>
#include <vector>

#include "rmd/dataset.hpp"
#include "rmd/graph.hpp"
#include "rmd/rank.hpp"

namespace rmd {

/// Cluster assignment over n points; every cluster id in {0..c-1} occurs.
struct Partition {
    std::vector<int> assignment;
    int num_clusters = 0;

    void validate(int n) const;
    static Partition from_labels(const std::vector<int>& labels);
};

struct CutReport {
    double cut = 0.0;
    double ratio_cut = 0.0;
    double ncut = 0.0;
    std::vector<int> cluster_sizes;
    std::vector<double> cluster_volumes;
};

/// Cut, RatioCut and NCut of a partition. Binary partitions follow the
/// two-sided definitions; c > 2 uses the per-cluster sums.
CutReport cut_metrics(const SparseGraph& g, const Partition& p);

enum class CutMetric { cut, ratio_cut, ncut };

struct CutCurve {
    int axis = 0;
    std::vector<double> thresholds;
    std::vector<CutReport> values;

    /// Index of the smallest metric value among thresholds whose smaller
    /// side holds at least min_side points.
    int argmin(CutMetric metric, int min_side = 1) const;
};

/// Evaluate the metrics of the partitions {x_axis <= t} over a uniform
/// threshold grid; thresholds with an empty side are skipped.
CutCurve hyperplane_sweep(const SparseGraph& g, const DataSet& ds, int axis, int grid);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// C_d = 2 eta_{d-1} / ((d+1) eta_d^{1+1/d}).
double limit_cut_constant(int d);

/// Large-sample scaled NCut of the hyperplane {x_axis = t} for a constant
/// degree graph: C_d * integral over S of f^{1-1/d}, optionally times the
/// balance factor 1/mu(C+) + 1/mu(C-).
double limit_ncut_knn(const MixtureSpec& spec, int axis, double t, bool balance = true);

/// Same limit for the rank-modulated graph: the integrand carries the extra
/// factor rho(s)^{1+1/d} with rho = lambda + phi(p(s)).
double limit_ncut_rmd(const MixtureSpec& spec, int axis, double t, const DegreeScheme& scheme,
                      int pvalue_samples = kDefaultPValueSamples, std::uint64_t pvalue_seed = 12345);

/// CSV export: "threshold,cut,ratio_cut,ncut,size_left".
void save_curve_csv(const CutCurve& curve, const std::string& path);

}  // namespace rmd
