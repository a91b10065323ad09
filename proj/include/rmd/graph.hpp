#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmd/dataset.hpp"
#include "rmd/rank.hpp"

namespace rmd {

enum class WeightKind { binary, rbf };

/// Symmetric weighted graph over data points. Both directions of every edge
/// are stored; there are no self loops and all weights are positive.
struct SparseGraph {
    int n = 0;
    WeightKind weight_kind = WeightKind::binary;
    double sigma = 0.0;  // rbf bandwidth when weight_kind == rbf
    std::vector<std::vector<std::pair<int, double>>> adj;

    explicit SparseGraph(int nodes = 0) : n(nodes), adj(nodes) {}

    void add_edge(int i, int j, double w);
    bool has_edge(int i, int j) const;
    int degree(int i) const { return static_cast<int>(adj[i].size()); }
    /// Weighted degree, the node's share of vol().
    double volume(int i) const;
    double total_weight() const;
    std::size_t num_edges() const;
    /// Sort adjacency rows by neighbor index.
    void finalize();
    void validate() const;
    std::vector<int> components() const;
};

/// Exact nearest neighbors via sorted distances, up to `cap` per node.
class NeighborTable {
public:
    NeighborTable(const DataSet& ds, int cap);
    const std::vector<std::pair<double, int>>& row(int i) const { return rows_[i]; }
    /// Distance to the k-th nearest neighbor (1-based).
    double kth_distance(int i, int k) const { return rows_[i][k - 1].first; }
    int cap() const { return cap_; }

private:
    int cap_;
    std::vector<std::vector<std::pair<double, int>>> rows_;
};

SparseGraph knn_graph(const DataSet& ds, int k);
SparseGraph eps_graph(const DataSet& ds, double eps);
SparseGraph full_rbf_graph(const DataSet& ds, double sigma);

enum class PhiKind { linear, quadratic, cubic, custom };

/// Degree modulation deg(u) = k * (lambda + phi(R(u))). The scheme keeps the
/// mean degree at k by requiring lambda + E[phi(R)] = 1 for uniform R.
struct DegreeScheme {
    int k = 30;
    double lambda = 0.5;
    PhiKind phi = PhiKind::linear;
    double coeff = 1.0;
    std::vector<double> table;  // custom phi sampled on a uniform grid over [0,1]

    double phi_value(double r) const;
    /// Real-valued target degree k*(lambda + phi(r)) before rounding.
    double target(double r) const;
    void validate() const;
    std::string name() const;

    static DegreeScheme linear(int k);     // k(1/2 + R)
    static DegreeScheme quadratic(int k);  // k(1/3 + 2R^2)
    static DegreeScheme cubic(int k);      // k(1/4 + 3R^3)
};

struct DegreeProfile {
    std::vector<int> degrees;
};

/// Integer degrees: round the target, clamp below at max(1, round(k*lambda)).
DegreeProfile degree_profile(const RankVector& ranks, const DegreeScheme& scheme);

/// Rank-modulated graph, k-NN style: u links v if v is within u's deg(u)
/// nearest neighbors or vice versa.
SparseGraph rmd_graph_nn(const DataSet& ds, const DegreeProfile& profile);

/// Same edge set, new weights. sigma is required for rbf.
SparseGraph apply_weights(const SparseGraph& g, WeightKind kind, const DataSet& ds, double sigma = 0.0);

/// Mean over nodes of the k-th nearest-neighbor distance; the default rbf
/// bandwidth rule.
double average_knn_distance(const DataSet& ds, int k);

/// L = Deg - W, or I - Deg^{-1/2} W Deg^{-1/2} when normalized. Isolated
/// nodes get a unit diagonal in the normalized form.
Eigen::SparseMatrix<double> laplacian(const SparseGraph& g, bool normalized);

/// Edge list CSV: header "n=<count> weights=<kind>", then "i,j,weight" rows
/// with i < j, one per undirected edge.
void save_edge_csv(const SparseGraph& g, const std::string& path);
SparseGraph load_edge_csv(const std::string& path);

}  // namespace rmd
