#include "rmd/learn.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "rmd/bmatching.hpp"

namespace rmd {

namespace {

struct KMeansResult {
    std::vector<int> assign;
    double inertia = std::numeric_limits<double>::infinity();
};

KMeansResult kmeans_once(const Eigen::MatrixXd& rows, int k, Rng& rng, int max_iters, double tol) {
    const int n = static_cast<int>(rows.rows());
    Eigen::MatrixXd centers(k, rows.cols());

    // k-means++ seeding.
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.below(n));
    centers.row(0) = rows.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (rows.row(i) - centers.row(c - 1)).squaredNorm());
            total += d2[i];
        }
        int pick = 0;
        if (total > 0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.below(n));
        }
        centers.row(c) = rows.row(pick);
    }

    KMeansResult res;
    res.assign.assign(n, 0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iters; ++it) {
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                const double d = (rows.row(i) - centers.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            res.assign[i] = arg;
            inertia += best;
        }
        // Empty clusters steal the point farthest from its center.
        std::vector<int> counts(k, 0);
        for (int a : res.assign) ++counts[a];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            int steal = 0;
            double worst = -1.0;
            for (int i = 0; i < n; ++i) {
                if (counts[res.assign[i]] <= 1) continue;
                const double d = (rows.row(i) - centers.row(res.assign[i])).squaredNorm();
                if (d > worst) {
                    worst = d;
                    steal = i;
                }
            }
            --counts[res.assign[steal]];
            res.assign[steal] = c;
            counts[c] = 1;
        }
        centers.setZero();
        for (int i = 0; i < n; ++i) centers.row(res.assign[i]) += rows.row(i);
        counts.assign(k, 0);
        for (int a : res.assign) ++counts[a];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) centers.row(c) /= counts[c];
        }
        res.inertia = inertia;
        if (it > 0 && prev_inertia - inertia <= tol * std::max(prev_inertia, 1e-30)) break;
        prev_inertia = inertia;
    }
    return res;
}

KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed, int restarts = 20,
                    int max_iters = 300, double tol = 1e-6) {
    KMeansResult best;
    Rng rng(seed);
    for (int r = 0; r < restarts; ++r) {
        Rng local = rng.fork(r);
        KMeansResult cur = kmeans_once(rows, k, local, max_iters, tol);
        if (cur.inertia < best.inertia) best = cur;
    }
    return best;
}

}  // namespace

Partition spectral_clustering(const SparseGraph& g, int c, bool normalized, std::uint64_t seed) {
    if (c < 2) throw std::invalid_argument("spectral_clustering: need c >= 2");
    if (c > g.n) throw std::invalid_argument("spectral_clustering: more clusters than nodes");

    const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian(g, normalized));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_clustering: eigensolver failed");
    const Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(c);

    KMeansResult km = kmeans(embedding, c, seed);
    Partition p = Partition::from_labels(km.assign);
    p.validate(g.n);
    return p;
}

namespace {

Eigen::SparseMatrix<double> laplacian_block(const Eigen::SparseMatrix<double>& L,
                                            const std::vector<int>& rows,
                                            const std::vector<int>& cols) {
    std::vector<int> row_of(L.rows(), -1), col_of(L.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = static_cast<int>(j);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < L.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(L, k); it; ++it) {
            if (row_of[it.row()] >= 0 && col_of[it.col()] >= 0) {
                trips.emplace_back(row_of[it.row()], col_of[it.col()], it.value());
            }
        }
    }
    Eigen::SparseMatrix<double> B(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

// Plain conjugate gradients for SPD systems; stops at |Ax-b| <= tol*|b|.
Eigen::VectorXd conjugate_gradient(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                   double tol) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    const double b_norm = b.norm();
    if (b_norm == 0.0) return x;
    Eigen::VectorXd p = r;
    double rs = r.squaredNorm();
    const int max_iters = 20 * static_cast<int>(b.size()) + 100;
    for (int it = 0; it < max_iters; ++it) {
        if (std::sqrt(rs) <= tol * b_norm) break;
        const Eigen::VectorXd Ap = A * p;
        const double alpha = rs / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        const double rs_new = r.squaredNorm();
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    return x;
}

}  // namespace

Labeling grf(const SparseGraph& g, const LabeledSplit& split, const std::vector<int>& labels,
             double tol, int cg_threshold) {
    if (split.labeled.empty()) throw std::invalid_argument("grf: no labeled points");
    if (labels.size() != split.labeled.size())
        throw std::invalid_argument("grf: one label per labeled index required");

    int c = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("grf: negative class id");
        c = std::max(c, l + 1);
    }

    Labeling out;
    out.num_classes = c;
    out.scores.assign(static_cast<std::size_t>(g.n) * c, 0.0);
    out.hard.assign(g.n, 0);

    // Unlabeled nodes in components without any label cannot be solved for.
    const std::vector<int> comp = g.components();
    std::vector<char> comp_labeled(*std::max_element(comp.begin(), comp.end()) + 1, 0);
    for (int id : split.labeled) comp_labeled[comp[id]] = 1;

    std::vector<int> solvable;
    for (int id : split.unlabeled) {
        if (comp_labeled[comp[id]]) {
            solvable.push_back(id);
        } else {
            out.uniform_fallback.push_back(id);
        }
    }

    for (std::size_t a = 0; a < split.labeled.size(); ++a) {
        out.scores[static_cast<std::size_t>(split.labeled[a]) * c + labels[a]] = 1.0;
    }
    for (int id : out.uniform_fallback) {
        for (int j = 0; j < c; ++j) out.scores[static_cast<std::size_t>(id) * c + j] = 1.0 / c;
    }

    if (!solvable.empty()) {
        const Eigen::SparseMatrix<double> L = laplacian(g, false);
        const Eigen::SparseMatrix<double> Luu = laplacian_block(L, solvable, solvable);
        const Eigen::SparseMatrix<double> Lul = laplacian_block(L, solvable, split.labeled);

        Eigen::MatrixXd Yl = Eigen::MatrixXd::Zero(static_cast<int>(split.labeled.size()), c);
        for (std::size_t a = 0; a < split.labeled.size(); ++a) Yl(static_cast<int>(a), labels[a]) = 1.0;
        const Eigen::MatrixXd rhs = -(Lul * Yl);

        Eigen::MatrixXd Fu(static_cast<int>(solvable.size()), c);
        if (static_cast<int>(solvable.size()) < cg_threshold) {
            Eigen::LDLT<Eigen::MatrixXd> ldlt{Eigen::MatrixXd(Luu)};
            if (ldlt.info() != Eigen::Success) throw std::runtime_error("grf: dense factorization failed");
            Fu = ldlt.solve(rhs);
        } else {
            for (int j = 0; j < c; ++j) Fu.col(j) = conjugate_gradient(Luu, rhs.col(j), tol);
        }
        for (std::size_t a = 0; a < solvable.size(); ++a) {
            for (int j = 0; j < c; ++j) {
                out.scores[static_cast<std::size_t>(solvable[a]) * c + j] = Fu(static_cast<int>(a), j);
            }
        }
    }

    for (int i = 0; i < g.n; ++i) {
        int arg = 0;
        for (int j = 1; j < c; ++j) {
            if (out.score(i, j) > out.score(i, arg)) arg = j;
        }
        out.hard[i] = arg;
    }
    for (std::size_t a = 0; a < split.labeled.size(); ++a) out.hard[split.labeled[a]] = labels[a];
    return out;
}

Labeling gtam(const SparseGraph& g, const LabeledSplit& split, const std::vector<int>& labels,
              double mu, int max_iters, std::uint64_t seed) {
    (void)seed;  // the update sequence is deterministic
    if (mu <= 0) throw std::invalid_argument("gtam: mu must be positive");
    if (split.labeled.empty()) throw std::invalid_argument("gtam: no labeled points");
    if (labels.size() != split.labeled.size())
        throw std::invalid_argument("gtam: one label per labeled index required");

    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);

    // Normalized Laplacian per the alternating-minimization formulation.
    const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian(g, true));
    const Eigen::MatrixXd A = L / mu + Eigen::MatrixXd::Identity(g.n, g.n);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw std::runtime_error("gtam: factorization failed");
    const Eigen::MatrixXd K = llt.solve(Eigen::MatrixXd::Identity(g.n, g.n));

    std::vector<double> degree(g.n);
    for (int i = 0; i < g.n; ++i) degree[i] = g.volume(i);

    std::vector<int> assigned(g.n, -1);
    for (std::size_t a = 0; a < split.labeled.size(); ++a) assigned[split.labeled[a]] = labels[a];
    std::vector<int> class_count(c, 0);

    // Per class j: weighted = sum_i d_i K(:,i), plain = sum_i K(:,i) over its
    // labeled members, so an added label costs one column accumulation.
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(g.n, c);
    Eigen::MatrixXd plain = Eigen::MatrixXd::Zero(g.n, c);
    std::vector<double> mass(c, 0.0);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(g.n, c);

    auto absorb = [&](int node, int j) {
        weighted.col(j) += degree[node] * K.col(node);
        plain.col(j) += K.col(node);
        mass[j] += degree[node];
        ++class_count[j];
        // Zero-degree labeled sets fall back to uniform node weights.
        F.col(j) = mass[j] > 0 ? (weighted.col(j) / mass[j]).eval()
                               : (plain.col(j) / class_count[j]).eval();
        if (!F.col(j).allFinite()) throw std::runtime_error("gtam: propagation produced non-finite values");
    };
    for (int i = 0; i < g.n; ++i) {
        if (assigned[i] >= 0) absorb(i, assigned[i]);
    }

    int remaining = 0;
    for (int i = 0; i < g.n; ++i) remaining += assigned[i] < 0 ? 1 : 0;
    int budget = max_iters < 0 ? remaining : std::min(max_iters, remaining);
    while (budget-- > 0) {
        int bi = -1, bj = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.n; ++i) {
            if (assigned[i] >= 0) continue;
            for (int j = 0; j < c; ++j) {
                if (F(i, j) > best) {
                    best = F(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi < 0) break;
        assigned[bi] = bj;
        absorb(bi, bj);
    }

    Labeling out;
    out.num_classes = c;
    out.scores.assign(static_cast<std::size_t>(g.n) * c, 0.0);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < c; ++j) out.scores[static_cast<std::size_t>(i) * c + j] = F(i, j);
    }
    out.hard.assign(g.n, 0);
    for (int i = 0; i < g.n; ++i) {
        if (assigned[i] >= 0) {
            out.hard[i] = assigned[i];
        } else {
            int arg = 0;
            for (int j = 1; j < c; ++j) {
                if (F(i, j) > F(i, arg)) arg = j;
            }
            out.hard[i] = arg;
        }
    }
    return out;
}

GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "knn") return GraphKind::knn;
    if (s == "eps") return GraphKind::eps;
    if (s == "full_rbf") return GraphKind::full_rbf;
    if (s == "bmatch") return GraphKind::bmatch;
    if (s == "rmd") return GraphKind::rmd;
    throw std::invalid_argument("unknown graph kind '" + s + "'");
}

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::knn: return "knn";
        case GraphKind::eps: return "eps";
        case GraphKind::full_rbf: return "full_rbf";
        case GraphKind::bmatch: return "bmatch";
        case GraphKind::rmd: return "rmd";
    }
    return "unknown";
}

Algo algo_from_string(const std::string& s) {
    if (s == "sc") return Algo::sc;
    if (s == "grf") return Algo::grf;
    if (s == "gtam") return Algo::gtam;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

std::string to_string(Algo a) {
    switch (a) {
        case Algo::sc: return "sc";
        case Algo::grf: return "grf";
        case Algo::gtam: return "gtam";
    }
    return "unknown";
}

SparseGraph GraphRecipe::build(const DataSet& ds, std::uint64_t seed) const {
    const int n = ds.n;
    const int k_eff = std::clamp(k, 1, n - 1);

    SparseGraph g;
    switch (kind) {
        case GraphKind::knn:
            g = knn_graph(ds, k_eff);
            break;
        case GraphKind::eps: {
            const double radius = eps > 0 ? eps : average_knn_distance(ds, k_eff);
            g = eps_graph(ds, radius);
            break;
        }
        case GraphKind::full_rbf: {
            const double bw = sigma > 0 ? sigma : average_knn_distance(ds, k_eff);
            return full_rbf_graph(ds, bw);
        }
        case GraphKind::bmatch:
            g = bmatching_graph(ds, k_eff, bmatch_max_iters);
            break;
        case GraphKind::rmd: {
            StatisticSpec st = stat;
            // Cross-half statistics see n/2 reference points.
            const int half = n / 2;
            while (st.l > 1 && st.max_neighbor_order() > half) --st.l;
            const RankVector ranks = rank_ustat(ds, st, ustat_b, seed);
            DegreeScheme sch = scheme;
            sch.k = k_eff;
            DegreeProfile profile = degree_profile(ranks, sch);
            for (int& d : profile.degrees) d = std::min(d, n - 1);
            g = rmd_graph_nn(ds, profile);
            break;
        }
    }
    if (weights == WeightKind::rbf) {
        const double bw = sigma > 0 ? sigma : average_knn_distance(ds, k_eff);
        g = apply_weights(g, WeightKind::rbf, ds, bw);
    }
    return g;
}

GraphRecipe GraphRecipe::with_scheme(const DegreeScheme& s) const {
    GraphRecipe r = *this;
    r.scheme = s;
    r.kind = GraphKind::rmd;
    return r;
}

Partition divisive_cluster(const DataSet& ds, int target_c, const GraphRecipe& recipe,
                           std::uint64_t seed, int min_part, std::vector<SplitRecord>* trace) {
    ds.validate();
    if (target_c < 2) throw std::invalid_argument("divisive_cluster: target_c must be >= 2");
    if (min_part < 1) throw std::invalid_argument("divisive_cluster: min_part must be >= 1");

    struct Tentative {
        bool valid = false;
        std::vector<int> left, right;
        double ratio_cut = std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<int>> parts;
    {
        std::vector<int> all(ds.n);
        std::iota(all.begin(), all.end(), 0);
        parts.push_back(std::move(all));
    }
    std::vector<Tentative> tentative(1);
    std::vector<char> fresh{0};
    Rng rng(seed);
    int builds = 0;

    auto compute_tentative = [&](const std::vector<int>& part) {
        Tentative t;
        if (static_cast<int>(part.size()) < std::max(2, 2 * min_part)) return t;  // frozen
        const DataSet sub = ds.subset(part);
        const std::uint64_t sub_seed = rng.fork(builds++).next();
        const SparseGraph sg = recipe.build(sub, sub_seed);
        const Partition sp = spectral_clustering(sg, 2, false, sub_seed);
        const CutReport rep = cut_metrics(sg, sp);
        t.valid = true;
        t.ratio_cut = rep.ratio_cut;
        for (std::size_t i = 0; i < part.size(); ++i) {
            (sp.assignment[i] == 0 ? t.left : t.right).push_back(part[i]);
        }
        return t;
    };

    while (static_cast<int>(parts.size()) < target_c) {
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            if (!fresh[pi]) {
                tentative[pi] = compute_tentative(parts[pi]);
                fresh[pi] = 1;
            }
        }
        int best = -1;
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            if (tentative[pi].valid &&
                (best < 0 || tentative[pi].ratio_cut < tentative[best].ratio_cut)) {
                best = static_cast<int>(pi);
            }
        }
        if (best < 0) break;  // everything frozen

        Tentative chosen = std::move(tentative[best]);
        if (trace) {
            trace->push_back({parts[best], chosen.left, chosen.right, chosen.ratio_cut});
        }
        parts[best] = chosen.left;
        tentative[best] = Tentative{};
        fresh[best] = 0;
        parts.push_back(chosen.right);
        tentative.emplace_back();
        fresh.push_back(0);
    }

    Partition p;
    p.assignment.assign(ds.n, 0);
    p.num_clusters = static_cast<int>(parts.size());
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        for (int id : parts[pi]) p.assignment[id] = static_cast<int>(pi);
    }
    p.validate(ds.n);
    return p;
}

CvOutcome cross_validate(const DataSet& ds, const CvConfig& cfg, Algo algo, std::uint64_t seed,
                         const LabeledSplit* split, const std::vector<int>* labels) {
    if (cfg.schemes.empty()) throw std::invalid_argument("cross_validate: no degree schemes");
    if (algo != Algo::sc && (split == nullptr || labels == nullptr))
        throw std::invalid_argument("cross_validate: transduction needs a labeled split");

    CvOutcome outcome;
    const int min_size = static_cast<int>(std::ceil(cfg.min_cluster_fraction * ds.n));
    for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
        const GraphRecipe recipe = cfg.recipe.with_scheme(cfg.schemes[si]);
        const SparseGraph g = recipe.build(ds, seed);

        CvCandidate cand;
        cand.scheme = cfg.schemes[si];
        switch (algo) {
            case Algo::sc:
                cand.partition = spectral_clustering(g, cfg.clusters, cfg.normalized, seed);
                break;
            case Algo::grf:
                cand.labeling = grf(g, *split, *labels);
                cand.partition = Partition::from_labels(cand.labeling->hard);
                break;
            case Algo::gtam:
                cand.labeling = gtam(g, *split, *labels);
                cand.partition = Partition::from_labels(cand.labeling->hard);
                break;
        }
        cand.report = cut_metrics(g, cand.partition);
        const int smallest =
            *std::min_element(cand.report.cluster_sizes.begin(), cand.report.cluster_sizes.end());
        cand.discarded = smallest < min_size;
        outcome.candidates.push_back(std::move(cand));
    }

    double best_cut = std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < outcome.candidates.size(); ++si) {
        const auto& cand = outcome.candidates[si];
        if (!cand.discarded && cand.report.cut < best_cut) {
            best_cut = cand.report.cut;
            outcome.selected = static_cast<int>(si);
        }
    }
    if (outcome.selected < 0) {
        // Every scheme produced a tiny cluster: fall back to the least bad one.
        outcome.all_discarded = true;
        int best_min = -1;
        for (std::size_t si = 0; si < outcome.candidates.size(); ++si) {
            const auto& sizes = outcome.candidates[si].report.cluster_sizes;
            const int smallest = *std::min_element(sizes.begin(), sizes.end());
            if (smallest > best_min) {
                best_min = smallest;
                outcome.selected = static_cast<int>(si);
            }
        }
    }
    outcome.candidates[outcome.selected].selected = true;
    return outcome;
}

namespace {

double misassignment(const std::vector<int>& mapping, const std::vector<std::vector<int>>& confusion,
                     int n) {
    long hit = 0;
    for (std::size_t cl = 0; cl < mapping.size(); ++cl) hit += confusion[cl][mapping[cl]];
    return 1.0 - static_cast<double>(hit) / n;
}

}  // namespace

double error_rate(const Partition& pred, const std::vector<int>& truth) {
    if (pred.assignment.size() != truth.size())
        throw std::invalid_argument("error_rate: prediction and truth lengths differ");
    int classes = 0;
    for (int t : truth) classes = std::max(classes, t + 1);
    if (pred.num_clusters > classes)
        throw std::invalid_argument("error_rate: more clusters than truth classes");

    const int n = static_cast<int>(truth.size());
    std::vector<std::vector<int>> confusion(pred.num_clusters, std::vector<int>(classes, 0));
    for (int i = 0; i < n; ++i) ++confusion[pred.assignment[i]][truth[i]];

    if (classes <= 6) {
        std::vector<int> classes_perm(classes);
        std::iota(classes_perm.begin(), classes_perm.end(), 0);
        double best = 1.0;
        do {
            std::vector<int> mapping(classes_perm.begin(), classes_perm.begin() + pred.num_clusters);
            best = std::min(best, misassignment(mapping, confusion, n));
        } while (std::next_permutation(classes_perm.begin(), classes_perm.end()));
        return best;
    }

    // Beyond exhaustive range: greedy assignment over the largest confusion
    // entries, an approximation of the optimal matching.
    std::vector<char> used_cluster(pred.num_clusters, 0), used_class(classes, 0);
    std::vector<int> mapping(pred.num_clusters, -1);
    for (int step = 0; step < pred.num_clusters; ++step) {
        int bc = -1, bt = -1, best = -1;
        for (int cl = 0; cl < pred.num_clusters; ++cl) {
            if (used_cluster[cl]) continue;
            for (int t = 0; t < classes; ++t) {
                if (used_class[t]) continue;
                if (confusion[cl][t] > best) {
                    best = confusion[cl][t];
                    bc = cl;
                    bt = t;
                }
            }
        }
        mapping[bc] = bt;
        used_cluster[bc] = 1;
        used_class[bt] = 1;
    }
    return misassignment(mapping, confusion, static_cast<int>(truth.size()));
}

double ssl_error_rate(const Labeling& pred, const std::vector<int>& truth, const LabeledSplit& split) {
    if (pred.hard.size() != truth.size())
        throw std::invalid_argument("ssl_error_rate: prediction and truth lengths differ");
    if (split.unlabeled.empty()) return 0.0;
    int wrong = 0;
    for (int id : split.unlabeled) wrong += pred.hard[id] != truth[id] ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(split.unlabeled.size());
}

}  // namespace rmd
