#include "rmd/bmatching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace rmd {

bool degree_sequence_graphical(std::vector<int> degrees) {
    const int n = static_cast<int>(degrees.size());
    long long sum = 0;
    for (int d : degrees) {
        if (d < 0 || d >= n) return false;
        sum += d;
    }
    if (sum % 2 != 0) return false;
    std::sort(degrees.begin(), degrees.end(), std::greater<int>());
    std::vector<long long> prefix(n + 1, 0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + degrees[i];
    for (int k = 1; k <= n; ++k) {
        long long rhs = static_cast<long long>(k) * (k - 1);
        for (int i = k; i < n; ++i) rhs += std::min(degrees[i], k);
        if (prefix[k] > rhs) return false;
    }
    return true;
}

namespace {

struct Selection {
    std::vector<std::vector<int>> picks;  // per node, chosen partners
    bool consistent = false;
};

// Forced edges and per-node candidate sets after saturating nodes whose
// residual demand equals their number of available partners.
struct Reduction {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::vector<int>> candidates;
    std::vector<int> residual;
    bool feasible = true;
};

Reduction reduce_problem(int n, const std::vector<int>& degrees) {
    Reduction red;
    red.residual = degrees;
    red.candidates.assign(n, {});
    std::vector<std::vector<char>> blocked(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) blocked[i][i] = 1;

    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (red.residual[i] == 0) continue;
            std::vector<int> avail;
            for (int j = 0; j < n; ++j) {
                if (!blocked[i][j] && red.residual[j] > 0) avail.push_back(j);
            }
            if (static_cast<int>(avail.size()) < red.residual[i]) {
                red.feasible = false;
                return red;
            }
            if (static_cast<int>(avail.size()) == red.residual[i]) {
                for (int j : avail) {
                    red.forced.emplace_back(std::min(i, j), std::max(i, j));
                    blocked[i][j] = blocked[j][i] = 1;
                    --red.residual[i];
                    --red.residual[j];
                }
                changed = true;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        if (red.residual[i] == 0) continue;
        for (int j = 0; j < n; ++j) {
            if (!blocked[i][j] && red.residual[j] > 0) red.candidates[i].push_back(j);
        }
    }
    return red;
}

}  // namespace

BMatchResult exact_degree_matching(const std::vector<double>& dist, int n,
                                   const std::vector<int>& degrees) {
    if (!degree_sequence_graphical(degrees))
        throw std::invalid_argument("exact_degree_matching: degree sequence is not graphical");

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    // Cheap edges first so the bound tightens early.
    std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        return dist[a.first * n + a.second] < dist[b.first * n + b.second];
    });

    std::vector<int> residual = degrees;
    std::vector<std::vector<char>> best_adj, cur_adj(n, std::vector<char>(n, 0));
    double best = std::numeric_limits<double>::infinity();

    // remaining_slots[i][p]: how many pairs at position >= p involve node i.
    const int np = static_cast<int>(pairs.size());
    std::vector<std::vector<int>> remaining(n, std::vector<int>(np + 1, 0));
    for (int p = np - 1; p >= 0; --p) {
        for (int i = 0; i < n; ++i) {
            remaining[i][p] = remaining[i][p + 1] + (pairs[p].first == i || pairs[p].second == i ? 1 : 0);
        }
    }

    std::function<void(int, double)> dfs = [&](int p, double cost) {
        if (cost >= best) return;
        if (p == np) {
            if (std::all_of(residual.begin(), residual.end(), [](int r) { return r == 0; })) {
                best = cost;
                best_adj = cur_adj;
            }
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (residual[i] > remaining[i][p]) return;  // cannot be saturated anymore
        }
        const auto [a, b] = pairs[p];
        // Take the edge.
        if (residual[a] > 0 && residual[b] > 0) {
            --residual[a];
            --residual[b];
            cur_adj[a][b] = cur_adj[b][a] = 1;
            dfs(p + 1, cost + dist[a * n + b]);
            cur_adj[a][b] = cur_adj[b][a] = 0;
            ++residual[a];
            ++residual[b];
        }
        // Skip it.
        dfs(p + 1, cost);
    };
    dfs(0, 0.0);

    BMatchResult res;
    res.exact_fallback = true;
    if (!std::isfinite(best)) throw std::runtime_error("exact_degree_matching: no feasible matching found");
    res.graph = SparseGraph(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (best_adj[i][j]) res.graph.add_edge(i, j, 1.0);
        }
    }
    res.graph.finalize();
    res.objective = best;
    return res;
}

namespace {

Selection extract_selection(int n, const Reduction& red, const std::vector<double>& weight,
                            const std::vector<double>& messages) {
    Selection sel;
    sel.picks.assign(n, {});
    for (int i = 0; i < n; ++i) {
        const auto& cand = red.candidates[i];
        const int b = red.residual[i];
        if (b == 0 || cand.empty()) continue;
        std::vector<std::pair<double, int>> vals;
        vals.reserve(cand.size());
        for (int j : cand) {
            // Sort key is (-value, index): ties go to the lower index.
            vals.emplace_back(-(weight[i * n + j] + messages[j * n + i]), j);
        }
        std::partial_sort(vals.begin(), vals.begin() + std::min<std::size_t>(b, vals.size()), vals.end());
        for (int a = 0; a < b && a < static_cast<int>(vals.size()); ++a) {
            sel.picks[i].push_back(vals[a].second);
        }
    }
    sel.consistent = true;
    std::vector<std::vector<char>> chosen(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j : sel.picks[i]) chosen[i][j] = 1;
    }
    for (int i = 0; i < n && sel.consistent; ++i) {
        int mutual = 0;
        for (int j : sel.picks[i]) {
            if (chosen[j][i]) ++mutual;
        }
        if (mutual != red.residual[i]) sel.consistent = false;
    }
    return sel;
}

SparseGraph selection_to_graph(int n, const Reduction& red, const Selection& sel) {
    SparseGraph g(n);
    for (const auto& [i, j] : red.forced) g.add_edge(i, j, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j : sel.picks[i]) {
            if (j > i && std::find(sel.picks[j].begin(), sel.picks[j].end(), i) != sel.picks[j].end()) {
                g.add_edge(i, j, 1.0);
            }
        }
    }
    g.finalize();
    return g;
}

double matching_cost(const SparseGraph& g, const std::vector<double>& dist) {
    double c = 0.0;
    for (int i = 0; i < g.n; ++i) {
        for (const auto& [j, w] : g.adj[i]) {
            if (j > i) c += dist[i * g.n + j];
        }
    }
    return c;
}

// Fill remaining degree deficits in place. Moves: connect two deficient
// nodes, or rewire an existing edge through a deficient node.
bool repair_deficits(SparseGraph& g, const std::vector<double>& dist,
                     const std::vector<int>& degrees) {
    const int n = g.n;
    auto deficit = [&](int i) { return degrees[i] - g.degree(i); };
    auto total_deficit = [&]() {
        int t = 0;
        for (int i = 0; i < n; ++i) t += deficit(i);
        return t;
    };

    int guard = 4 * n * n;
    while (total_deficit() > 0 && guard-- > 0) {
        // Move 1: cheapest new edge between two deficient nodes.
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (deficit(i) <= 0) continue;
            for (int j = i + 1; j < n; ++j) {
                if (deficit(j) <= 0 || g.has_edge(i, j)) continue;
                if (dist[i * n + j] < best) {
                    best = dist[i * n + j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi >= 0) {
            g.add_edge(bi, bj, 1.0);
            continue;
        }
        // Move 2: node i short by >= 2 absorbs an existing edge (a,b).
        bool moved = false;
        for (int i = 0; i < n && !moved; ++i) {
            if (deficit(i) < 2) continue;
            double best_delta = std::numeric_limits<double>::infinity();
            int ba = -1, bb = -1;
            for (int a = 0; a < n; ++a) {
                if (a == i || g.has_edge(i, a)) continue;
                for (const auto& [b, w] : g.adj[a]) {
                    if (b <= a || b == i || g.has_edge(i, b)) continue;
                    const double delta = dist[i * n + a] + dist[i * n + b] - dist[a * n + b];
                    if (delta < best_delta) {
                        best_delta = delta;
                        ba = a;
                        bb = b;
                    }
                }
            }
            if (ba >= 0) {
                auto drop = [&](int u, int v) {
                    auto& row = g.adj[u];
                    row.erase(std::find_if(row.begin(), row.end(),
                                           [&](const auto& e) { return e.first == v; }));
                };
                drop(ba, bb);
                drop(bb, ba);
                g.add_edge(i, ba, 1.0);
                g.add_edge(i, bb, 1.0);
                moved = true;
            }
        }
        if (moved) continue;
        // Move 3: two distinct deficient nodes, typically already adjacent;
        // route both through an existing edge.
        std::vector<int> off;
        for (int i = 0; i < n; ++i) {
            if (deficit(i) > 0) off.push_back(i);
        }
        moved = false;
        for (std::size_t x = 0; x < off.size() && !moved; ++x) {
            for (std::size_t y = x + 1; y < off.size() && !moved; ++y) {
                const int i = off[x], j = off[y];
                for (int a = 0; a < n && !moved; ++a) {
                    if (a == i || a == j || g.has_edge(i, a)) continue;
                    for (const auto& [b, w] : g.adj[a]) {
                        if (b == i || b == j || g.has_edge(j, b)) continue;
                        auto drop = [&](int u, int v) {
                            auto& row = g.adj[u];
                            row.erase(std::find_if(row.begin(), row.end(),
                                                   [&](const auto& e) { return e.first == v; }));
                        };
                        drop(a, b);
                        drop(b, a);
                        g.add_edge(i, a, 1.0);
                        g.add_edge(j, b, 1.0);
                        moved = true;
                        break;
                    }
                }
            }
        }
        if (!moved) return false;
    }
    g.finalize();
    for (int i = 0; i < n; ++i) {
        if (g.degree(i) != degrees[i]) return false;
    }
    return true;
}

}  // namespace

BMatchResult min_cost_degree_matching(const std::vector<double>& dist, int n,
                                      const std::vector<int>& degrees, int max_iters,
                                      double damping, double tol) {
    if (static_cast<int>(dist.size()) != n * n)
        throw std::invalid_argument("min_cost_degree_matching: distance matrix must be n*n");
    if (static_cast<int>(degrees.size()) != n)
        throw std::invalid_argument("min_cost_degree_matching: degree count mismatch");
    if (max_iters < 1) throw std::invalid_argument("min_cost_degree_matching: max_iters must be >= 1");
    if (!degree_sequence_graphical(degrees))
        throw std::invalid_argument("min_cost_degree_matching: degree sequence is not graphical");

    const Reduction red = reduce_problem(n, degrees);
    if (!red.feasible)
        throw std::invalid_argument("min_cost_degree_matching: saturation made the instance infeasible");

    // Maximize sum of -distance.
    std::vector<double> weight(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = -dist[i];

    std::vector<double> messages(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> fresh(static_cast<std::size_t>(n) * n, 0.0);

    BMatchResult res;
    bool converged = false;
    int iter = 0;
    std::vector<double> vals;
    for (; iter < max_iters && !converged; ++iter) {
        double max_change = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& cand = red.candidates[i];
            const int b = red.residual[i];
            if (b == 0 || cand.empty()) continue;
            vals.clear();
            for (int j : cand) vals.push_back(weight[i * n + j] + messages[j * n + i]);
            // b-th and (b+1)-th largest over all candidates of i.
            std::vector<double> sorted(vals);
            std::nth_element(sorted.begin(), sorted.begin() + (b - 1), sorted.end(), std::greater<double>());
            const double bth = sorted[b - 1];
            double next = -std::numeric_limits<double>::infinity();
            if (b < static_cast<int>(sorted.size())) {
                std::nth_element(sorted.begin(), sorted.begin() + b, sorted.end(), std::greater<double>());
                next = sorted[b];
            }
            for (std::size_t a = 0; a < cand.size(); ++a) {
                const int j = cand[a];
                // Dropping j from the pool shifts the b-th largest only when
                // j sits inside the current top b.
                const double threshold = vals[a] >= bth ? next : bth;
                const double update = weight[i * n + j] - threshold;
                const double mixed = damping * messages[i * n + j] + (1.0 - damping) * update;
                max_change = std::max(max_change, std::abs(mixed - messages[i * n + j]));
                fresh[i * n + j] = mixed;
            }
        }
        std::swap(messages, fresh);
        if (max_change < tol) converged = true;
    }

    res.iterations = iter;
    res.converged = converged;

    const Selection sel = extract_selection(n, red, weight, messages);
    if (sel.consistent) {
        res.graph = selection_to_graph(n, red, sel);
        res.objective = matching_cost(res.graph, dist);
        return res;
    }

    if (n <= 14) {
        BMatchResult exact = exact_degree_matching(dist, n, degrees);
        exact.converged = converged;
        exact.iterations = iter;
        return exact;
    }

    // Keep the mutual picks, then patch the remaining deficits greedily.
    res.graph = selection_to_graph(n, red, sel);
    if (!repair_deficits(res.graph, dist, degrees)) {
        throw std::runtime_error("min_cost_degree_matching: feasibility repair failed");
    }
    res.repaired = true;
    res.objective = matching_cost(res.graph, dist);
    return res;
}

namespace {

std::vector<double> pairwise_distances(const DataSet& ds) {
    std::vector<double> dist(static_cast<std::size_t>(ds.n) * ds.n, 0.0);
    for (int i = 0; i < ds.n; ++i) {
        const auto pi = ds.point(i);
        for (int j = i + 1; j < ds.n; ++j) {
            double s = 0.0;
            const double* pj = ds.points.data() + static_cast<std::size_t>(j) * ds.dim;
            for (int a = 0; a < ds.dim; ++a) {
                const double diff = pi[a] - pj[a];
                s += diff * diff;
            }
            dist[i * ds.n + j] = dist[j * ds.n + i] = std::sqrt(s);
        }
    }
    return dist;
}

}  // namespace

SparseGraph rmd_graph_opt(const DataSet& ds, const DegreeProfile& profile, int max_iters,
                          BMatchResult* info) {
    ds.validate();
    if (profile.degrees.size() != static_cast<std::size_t>(ds.n))
        throw std::invalid_argument("rmd_graph_opt: profile length does not match dataset");
    std::vector<int> degrees = profile.degrees;
    // A rank-derived degree sum can be odd; bump one smallest degree so a
    // graph can exist at all.
    long long sum = std::accumulate(degrees.begin(), degrees.end(), 0LL);
    if (sum % 2 != 0) {
        const auto lowest = std::min_element(degrees.begin(), degrees.end());
        *lowest += 1;
    }
    if (!degree_sequence_graphical(degrees))
        throw std::invalid_argument("rmd_graph_opt: degree sequence is not graphical");
    BMatchResult res = min_cost_degree_matching(pairwise_distances(ds), ds.n, degrees, max_iters);
    if (info) *info = res;
    return res.graph;
}

SparseGraph bmatching_graph(const DataSet& ds, int b, int max_iters, BMatchResult* info) {
    ds.validate();
    if (b < 1 || b >= ds.n) throw std::invalid_argument("bmatching_graph: need 1 <= b < n");
    std::vector<int> degrees(ds.n, b);
    if ((static_cast<long long>(b) * ds.n) % 2 != 0) degrees[0] += 1;
    BMatchResult res = min_cost_degree_matching(pairwise_distances(ds), ds.n, degrees, max_iters);
    if (info) *info = res;
    return res.graph;
}

}  // namespace rmd
