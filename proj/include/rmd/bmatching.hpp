#pragma once

#include <cstdint>
#include <vector>

#include "rmd/graph.hpp"

namespace rmd {

/// Outcome of the degree-constrained matching solver.
struct BMatchResult {
    SparseGraph graph;
    bool converged = false;       // message passing reached the fixed point
    bool exact_fallback = false;  // branch-and-bound produced the result
    bool repaired = false;        // greedy feasibility repair was applied
    int iterations = 0;
    double objective = 0.0;  // total distance over selected edges
};

/// Erdos-Gallai test for an undirected simple graph with the given degrees.
bool degree_sequence_graphical(std::vector<int> degrees);

/// Minimum-total-distance symmetric 0/1 matching with exact per-node degree
/// constraints. Max-product message passing with synchronous damped updates;
/// small instances fall back to exact search when the messages do not settle
/// into a consistent selection, larger ones get a greedy feasibility repair.
BMatchResult min_cost_degree_matching(const std::vector<double>& dist, int n,
                                      const std::vector<int>& degrees, int max_iters,
                                      double damping = 0.5, double tol = 1e-9);

/// Exact minimum over all symmetric 0/1 matrices with the given degrees;
/// branch-and-bound, intended for small n.
BMatchResult exact_degree_matching(const std::vector<double>& dist, int n,
                                   const std::vector<int>& degrees);

/// RMD graph through the optimization route.
SparseGraph rmd_graph_opt(const DataSet& ds, const DegreeProfile& profile, int max_iters,
                          BMatchResult* info = nullptr);

/// Constant-degree baseline (the b-matching graph).
SparseGraph bmatching_graph(const DataSet& ds, int b, int max_iters, BMatchResult* info = nullptr);

}  // namespace rmd
