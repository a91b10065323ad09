#include "rmd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace rmd {

void SparseGraph::add_edge(int i, int j, double w) {
    if (i == j) throw std::invalid_argument("SparseGraph: self loops are not allowed");
    if (w <= 0) throw std::invalid_argument("SparseGraph: weights must be positive");
    adj[i].emplace_back(j, w);
    adj[j].emplace_back(i, w);
}

bool SparseGraph::has_edge(int i, int j) const {
    const auto& row = adj[i].size() <= adj[j].size() ? adj[i] : adj[j];
    const int other = adj[i].size() <= adj[j].size() ? j : i;
    for (const auto& [v, w] : row) {
        if (v == other) return true;
    }
    return false;
}

double SparseGraph::volume(int i) const {
    double v = 0.0;
    for (const auto& [j, w] : adj[i]) v += w;
    return v;
}

double SparseGraph::total_weight() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += volume(i);
    return t / 2.0;
}

std::size_t SparseGraph::num_edges() const {
    std::size_t e = 0;
    for (const auto& row : adj) e += row.size();
    return e / 2;
}

void SparseGraph::finalize() {
    for (auto& row : adj) std::sort(row.begin(), row.end());
}

void SparseGraph::validate() const {
    if (static_cast<int>(adj.size()) != n) throw std::runtime_error("SparseGraph: adjacency size mismatch");
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, w] : adj[i]) {
            if (j == i) throw std::runtime_error("SparseGraph: self loop at node " + std::to_string(i));
            if (w <= 0) throw std::runtime_error("SparseGraph: nonpositive weight");
            if (j < 0 || j >= n) throw std::runtime_error("SparseGraph: neighbor out of range");
            bool mirrored = false;
            for (const auto& [k, w2] : adj[j]) {
                if (k == i && w2 == w) {
                    mirrored = true;
                    break;
                }
            }
            if (!mirrored) throw std::runtime_error("SparseGraph: asymmetric edge");
        }
    }
}

std::vector<int> SparseGraph::components() const {
    std::vector<int> comp(n, -1);
    int next = 0;
    std::deque<int> queue;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        queue.push_back(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& [v, w] : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

NeighborTable::NeighborTable(const DataSet& ds, int cap) : cap_(std::min(cap, ds.n - 1)) {
    ds.validate();
    if (cap_ < 1) throw std::invalid_argument("NeighborTable: cap must be >= 1");
    rows_.resize(ds.n);
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(ds.n - 1);
    for (int i = 0; i < ds.n; ++i) {
        scratch.clear();
        const auto pi = ds.point(i);
        for (int j = 0; j < ds.n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            const double* pj = ds.points.data() + static_cast<std::size_t>(j) * ds.dim;
            for (int a = 0; a < ds.dim; ++a) {
                const double diff = pi[a] - pj[a];
                s += diff * diff;
            }
            scratch.emplace_back(s, j);
        }
        // (distance, index) ordering makes equidistant ties go to the lower index.
        if (cap_ < static_cast<int>(scratch.size())) {
            std::partial_sort(scratch.begin(), scratch.begin() + cap_, scratch.end());
            scratch.resize(cap_);
        } else {
            std::sort(scratch.begin(), scratch.end());
        }
        rows_[i].assign(scratch.begin(), scratch.end());
        for (auto& [d, j] : rows_[i]) d = std::sqrt(d);
    }
}

SparseGraph knn_graph(const DataSet& ds, int k) {
    ds.validate();
    if (k < 1 || k >= ds.n) throw std::invalid_argument("knn_graph: need 1 <= k < n");
    const NeighborTable nn(ds, k);
    SparseGraph g(ds.n);
    for (int i = 0; i < ds.n; ++i) {
        for (int a = 0; a < k; ++a) {
            const int j = nn.row(i)[a].second;
            if (!g.has_edge(i, j)) g.add_edge(i, j, 1.0);
        }
    }
    g.finalize();
    return g;
}

SparseGraph eps_graph(const DataSet& ds, double eps) {
    ds.validate();
    if (eps <= 0) throw std::invalid_argument("eps_graph: eps must be positive");
    const double eps2 = eps * eps;
    SparseGraph g(ds.n);
    for (int i = 0; i < ds.n; ++i) {
        const auto pi = ds.point(i);
        for (int j = i + 1; j < ds.n; ++j) {
            double s = 0.0;
            const double* pj = ds.points.data() + static_cast<std::size_t>(j) * ds.dim;
            for (int a = 0; a < ds.dim; ++a) {
                const double diff = pi[a] - pj[a];
                s += diff * diff;
            }
            if (s <= eps2) g.add_edge(i, j, 1.0);
        }
    }
    g.finalize();
    return g;
}

SparseGraph full_rbf_graph(const DataSet& ds, double sigma) {
    ds.validate();
    if (sigma <= 0) throw std::invalid_argument("full_rbf_graph: sigma must be positive");
    SparseGraph g(ds.n);
    g.weight_kind = WeightKind::rbf;
    g.sigma = sigma;
    const double denom = 2.0 * sigma * sigma;
    for (int i = 0; i < ds.n; ++i) {
        const auto pi = ds.point(i);
        for (int j = i + 1; j < ds.n; ++j) {
            double s = 0.0;
            const double* pj = ds.points.data() + static_cast<std::size_t>(j) * ds.dim;
            for (int a = 0; a < ds.dim; ++a) {
                const double diff = pi[a] - pj[a];
                s += diff * diff;
            }
            g.add_edge(i, j, std::exp(-s / denom));
        }
    }
    g.finalize();
    return g;
}

double DegreeScheme::phi_value(double r) const {
    switch (phi) {
        case PhiKind::linear: return coeff * r;
        case PhiKind::quadratic: return coeff * r * r;
        case PhiKind::cubic: return coeff * r * r * r;
        case PhiKind::custom: {
            if (table.size() < 2) throw std::invalid_argument("DegreeScheme: custom table needs >= 2 entries");
            const double pos = std::clamp(r, 0.0, 1.0) * (table.size() - 1);
            const std::size_t lo = std::min(static_cast<std::size_t>(pos), table.size() - 2);
            const double frac = pos - static_cast<double>(lo);
            return coeff * ((1.0 - frac) * table[lo] + frac * table[lo + 1]);
        }
    }
    return 0.0;
}

double DegreeScheme::target(double r) const { return k * (lambda + phi_value(r)); }

void DegreeScheme::validate() const {
    if (k < 1) throw std::invalid_argument("DegreeScheme: k must be >= 1");
    if (lambda < 0 || lambda > 1) throw std::invalid_argument("DegreeScheme: lambda must be in [0,1]");
    if (coeff < 0) throw std::invalid_argument("DegreeScheme: coefficient must be nonnegative");
    double mean_phi = 0.0;
    switch (phi) {
        case PhiKind::linear: mean_phi = coeff / 2.0; break;
        case PhiKind::quadratic: mean_phi = coeff / 3.0; break;
        case PhiKind::cubic: mean_phi = coeff / 4.0; break;
        case PhiKind::custom: {
            if (table.size() < 2) throw std::invalid_argument("DegreeScheme: custom table needs >= 2 entries");
            for (std::size_t i = 1; i < table.size(); ++i) {
                if (table[i] < table[i - 1])
                    throw std::invalid_argument("DegreeScheme: custom phi must be nondecreasing");
            }
            // Trapezoid rule is exact on the piecewise-linear interpolant.
            double integral = 0.0;
            for (std::size_t i = 1; i < table.size(); ++i) integral += 0.5 * (table[i] + table[i - 1]);
            mean_phi = coeff * integral / static_cast<double>(table.size() - 1);
            break;
        }
    }
    if (std::abs(lambda + mean_phi - 1.0) > 1e-9)
        throw std::invalid_argument("DegreeScheme: lambda + E[phi(R)] must equal 1 to keep mean degree k");
}

std::string DegreeScheme::name() const {
    switch (phi) {
        case PhiKind::linear: return "linear";
        case PhiKind::quadratic: return "quadratic";
        case PhiKind::cubic: return "cubic";
        case PhiKind::custom: return "custom";
    }
    return "unknown";
}

DegreeScheme DegreeScheme::linear(int k) { return {k, 0.5, PhiKind::linear, 1.0, {}}; }
DegreeScheme DegreeScheme::quadratic(int k) { return {k, 1.0 / 3.0, PhiKind::quadratic, 2.0, {}}; }
DegreeScheme DegreeScheme::cubic(int k) { return {k, 0.25, PhiKind::cubic, 3.0, {}}; }

DegreeProfile degree_profile(const RankVector& ranks, const DegreeScheme& scheme) {
    scheme.validate();
    const long floor_deg = std::max<long>(1, std::lround(scheme.k * scheme.lambda));
    DegreeProfile profile;
    profile.degrees.reserve(ranks.values.size());
    for (double r : ranks.values) {
        const long deg = std::lround(scheme.target(r));
        profile.degrees.push_back(static_cast<int>(std::max(deg, floor_deg)));
    }
    return profile;
}

SparseGraph rmd_graph_nn(const DataSet& ds, const DegreeProfile& profile) {
    ds.validate();
    if (profile.degrees.size() != static_cast<std::size_t>(ds.n))
        throw std::invalid_argument("rmd_graph_nn: profile length does not match dataset");
    int max_deg = 0;
    for (int d : profile.degrees) {
        if (d < 1) throw std::invalid_argument("rmd_graph_nn: degrees must be >= 1");
        max_deg = std::max(max_deg, d);
    }
    if (max_deg >= ds.n) throw std::invalid_argument("rmd_graph_nn: max degree must be < n");

    const NeighborTable nn(ds, max_deg);
    SparseGraph g(ds.n);
    for (int i = 0; i < ds.n; ++i) {
        for (int a = 0; a < profile.degrees[i]; ++a) {
            const int j = nn.row(i)[a].second;
            if (!g.has_edge(i, j)) g.add_edge(i, j, 1.0);
        }
    }
    g.finalize();
    return g;
}

SparseGraph apply_weights(const SparseGraph& g, WeightKind kind, const DataSet& ds, double sigma) {
    SparseGraph out(g.n);
    out.weight_kind = kind;
    if (kind == WeightKind::rbf) {
        if (sigma <= 0) throw std::invalid_argument("apply_weights: rbf needs sigma > 0");
        if (ds.n != g.n) throw std::invalid_argument("apply_weights: dataset does not match graph");
        out.sigma = sigma;
    }
    const double denom = 2.0 * sigma * sigma;
    for (int i = 0; i < g.n; ++i) {
        for (const auto& [j, w] : g.adj[i]) {
            if (j <= i) continue;
            if (kind == WeightKind::binary) {
                out.add_edge(i, j, 1.0);
            } else {
                double s = 0.0;
                const auto pi = ds.point(i);
                const double* pj = ds.points.data() + static_cast<std::size_t>(j) * ds.dim;
                for (int a = 0; a < ds.dim; ++a) {
                    const double diff = pi[a] - pj[a];
                    s += diff * diff;
                }
                out.add_edge(i, j, std::exp(-s / denom));
            }
        }
    }
    out.finalize();
    return out;
}

double average_knn_distance(const DataSet& ds, int k) {
    if (k < 1 || k >= ds.n) throw std::invalid_argument("average_knn_distance: need 1 <= k < n");
    const NeighborTable nn(ds, k);
    double sum = 0.0;
    for (int i = 0; i < ds.n; ++i) sum += nn.kth_distance(i, k);
    return sum / ds.n;
}

Eigen::SparseMatrix<double> laplacian(const SparseGraph& g, bool normalized) {
    if (g.n < 1) throw std::invalid_argument("laplacian: empty graph");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.num_edges() * 2 + g.n);
    std::vector<double> deg(g.n);
    for (int i = 0; i < g.n; ++i) deg[i] = g.volume(i);

    if (!normalized) {
        for (int i = 0; i < g.n; ++i) {
            trips.emplace_back(i, i, deg[i]);
            for (const auto& [j, w] : g.adj[i]) trips.emplace_back(i, j, -w);
        }
    } else {
        for (int i = 0; i < g.n; ++i) {
            trips.emplace_back(i, i, 1.0);  // isolated nodes keep the unit diagonal
            if (deg[i] <= 0) continue;
            for (const auto& [j, w] : g.adj[i]) {
                if (deg[j] <= 0) continue;
                trips.emplace_back(i, j, -w / std::sqrt(deg[i] * deg[j]));
            }
        }
    }
    Eigen::SparseMatrix<double> L(g.n, g.n);
    L.setFromTriplets(trips.begin(), trips.end());
    return L;
}

void save_edge_csv(const SparseGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_edge_csv: cannot write " + path);
    out.precision(17);
    out << "n=" << g.n << " weights=";
    if (g.weight_kind == WeightKind::binary) {
        out << "binary";
    } else {
        out << "rbf(" << g.sigma << ")";
    }
    out << '\n';
    for (int i = 0; i < g.n; ++i) {
        for (const auto& [j, w] : g.adj[i]) {
            if (j > i) out << i << ',' << j << ',' << w << '\n';
        }
    }
}

SparseGraph load_edge_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_edge_csv: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("load_edge_csv: " + path + " is empty");

    int n = 0;
    WeightKind kind = WeightKind::binary;
    double sigma = 0.0;
    {
        std::stringstream ss(header);
        std::string tok;
        while (ss >> tok) {
            if (tok.rfind("n=", 0) == 0) {
                n = std::stoi(tok.substr(2));
            } else if (tok.rfind("weights=", 0) == 0) {
                const std::string w = tok.substr(8);
                if (w == "binary") {
                    kind = WeightKind::binary;
                } else if (w.rfind("rbf(", 0) == 0 && w.back() == ')') {
                    kind = WeightKind::rbf;
                    sigma = std::stod(w.substr(4, w.size() - 5));
                } else {
                    throw std::runtime_error("load_edge_csv: unknown weight kind '" + w + "'");
                }
            }
        }
    }
    if (n < 1) throw std::runtime_error("load_edge_csv: bad header '" + header + "'");

    SparseGraph g(n);
    g.weight_kind = kind;
    g.sigma = sigma;
    std::string line;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw std::runtime_error("load_edge_csv: malformed row " + std::to_string(row));
        g.add_edge(std::stoi(a), std::stoi(b), std::stod(c));
    }
    g.finalize();
    return g;
}

}  // namespace rmd
