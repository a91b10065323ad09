#include "rmd/dataset.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

namespace rmd {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = std::min<int>(threads, static_cast<int>(count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

int DataSet::num_classes() const {
    if (labels.empty()) return 0;
    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);
    return c;
}

DataSet DataSet::subset(const std::vector<int>& ids) const {
    DataSet out;
    out.dim = dim;
    out.n = static_cast<int>(ids.size());
    out.points.reserve(ids.size() * dim);
    for (int id : ids) {
        auto p = point(id);
        out.points.insert(out.points.end(), p.begin(), p.end());
    }
    if (has_labels()) {
        out.labels.reserve(ids.size());
        for (int id : ids) out.labels.push_back(labels[id]);
        out.label_names = label_names;
    }
    return out;
}

void DataSet::validate() const {
    if (n < 2) throw std::invalid_argument("DataSet: need at least 2 points");
    if (dim < 1) throw std::invalid_argument("DataSet: dimension must be positive");
    if (points.size() != static_cast<std::size_t>(n) * dim)
        throw std::invalid_argument("DataSet: point storage does not match n*dim");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("DataSet: labels must cover every point");
}

int MixtureSpec::dim() const {
    return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

void MixtureSpec::validate() const {
    if (components.empty()) throw std::invalid_argument("MixtureSpec: no components");
    const int d = dim();
    double wsum = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        if (comp.weight < 0) throw std::invalid_argument("MixtureSpec: negative weight");
        if (static_cast<int>(comp.mean.size()) != d)
            throw std::invalid_argument("MixtureSpec: inconsistent component dimensions");
        if (comp.cov.size() != static_cast<std::size_t>(d) * d)
            throw std::invalid_argument("MixtureSpec: covariance must be dim x dim");
        Eigen::Map<const Eigen::MatrixXd> cov(comp.cov.data(), d, d);
        if (!cov.isApprox(cov.transpose(), 1e-10))
            throw std::invalid_argument("MixtureSpec: covariance of component " + std::to_string(c) + " is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("MixtureSpec: covariance of component " + std::to_string(c) + " is not positive-definite");
        wsum += comp.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("MixtureSpec: weights must sum to 1");
}

double MixtureSpec::density(std::span<const double> x) const {
    const int d = dim();
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
    double f = 0.0;
    for (const auto& comp : components) {
        Eigen::Map<const Eigen::VectorXd> mu(comp.mean.data(), d);
        Eigen::Map<const Eigen::MatrixXd> cov(comp.cov.data(), d, d);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        const Eigen::VectorXd diff = xv - mu;
        const Eigen::VectorXd z = llt.matrixL().solve(diff);
        double logdet = 0.0;
        for (int i = 0; i < d; ++i) logdet += std::log(llt.matrixL()(i, i));
        const double quad = z.squaredNorm();
        f += comp.weight * std::exp(-0.5 * quad - logdet - 0.5 * d * std::log(2.0 * M_PI));
    }
    return f;
}

double MixtureSpec::marginal_sigma(int c, int axis) const {
    const int d = dim();
    return std::sqrt(components[c].cov[static_cast<std::size_t>(axis) * d + axis]);
}

double MixtureSpec::side_mass(int axis, double t) const {
    double mass = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
        const double mu = components[c].mean[axis];
        const double sigma = marginal_sigma(static_cast<int>(c), axis);
        mass += components[c].weight * normal_cdf((t - mu) / sigma);
    }
    return mass;
}

MixtureSpec MixtureSpec::single(std::vector<double> mean, std::vector<double> cov, double weight) {
    MixtureSpec spec;
    spec.components.push_back({weight, std::move(mean), std::move(cov)});
    return spec;
}

DataSet gen_mixture(const MixtureSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 2) throw std::invalid_argument("gen_mixture: n must be >= 2");
    const int d = spec.dim();

    // Cache Cholesky factors once per component.
    std::vector<Eigen::MatrixXd> factors;
    factors.reserve(spec.components.size());
    for (const auto& comp : spec.components) {
        Eigen::Map<const Eigen::MatrixXd> cov(comp.cov.data(), d, d);
        factors.push_back(Eigen::LLT<Eigen::MatrixXd>(cov).matrixL());
    }

    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& comp : spec.components) {
        acc += comp.weight;
        cum.push_back(acc);
    }
    cum.back() = 1.0;

    DataSet ds;
    ds.n = n;
    ds.dim = d;
    ds.points.resize(static_cast<std::size_t>(n) * d);
    ds.labels.resize(n);
    for (std::size_t c = 0; c < spec.components.size(); ++c) ds.label_names.push_back(std::to_string(c));

    Rng rng(seed);
    Eigen::VectorXd z(d);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        int comp = 0;
        while (u >= cum[comp] && comp + 1 < static_cast<int>(cum.size())) ++comp;
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        Eigen::Map<const Eigen::VectorXd> mu(spec.components[comp].mean.data(), d);
        Eigen::Map<Eigen::VectorXd>(ds.points.data() + static_cast<std::size_t>(i) * d, d) = mu + factors[comp] * z;
        ds.labels[i] = comp;
    }
    return ds;
}

DataSet gen_banana_scene(const std::array<int, 3>& n_per_cluster,
                         const std::vector<std::array<double, 2>>& outliers,
                         std::uint64_t seed,
                         const BananaSceneConfig& config) {
    for (int c : n_per_cluster) {
        if (c < 1) throw std::invalid_argument("gen_banana_scene: cluster counts must be positive");
    }
    Rng rng(seed);
    DataSet ds;
    ds.dim = 2;
    ds.n = n_per_cluster[0] + n_per_cluster[1] + n_per_cluster[2] + static_cast<int>(outliers.size());
    ds.points.reserve(static_cast<std::size_t>(ds.n) * 2);
    ds.labels.reserve(ds.n);
    ds.label_names = {"0", "1", "2"};

    auto push = [&](double x, double y, int label) {
        ds.points.push_back(x);
        ds.points.push_back(y);
        ds.labels.push_back(label);
    };

    const std::array<std::array<double, 2>, 2> blob_means{config.blob1_mean, config.blob2_mean};
    for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < n_per_cluster[b]; ++i) {
            push(blob_means[b][0] + config.blob_sigma * rng.normal(),
                 blob_means[b][1] + config.blob_sigma * rng.normal(), b);
        }
    }
    for (int i = 0; i < n_per_cluster[2]; ++i) {
        const double theta = config.arc_from + (config.arc_to - config.arc_from) * rng.uniform();
        const double r = config.arc_radius + config.arc_noise * rng.normal();
        push(config.arc_center[0] + r * std::cos(theta),
             config.arc_center[1] + r * std::sin(theta), 2);
    }

    const int generated = ds.labels.empty() ? 0 : static_cast<int>(ds.labels.size());
    for (const auto& o : outliers) {
        int best = 0;
        double best_d = std::numeric_limits<double>::max();
        for (int i = 0; i < generated; ++i) {
            const double dx = ds.points[2 * i] - o[0];
            const double dy = ds.points[2 * i + 1] - o[1];
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d) {
                best_d = d2;
                best = ds.labels[i];
            }
        }
        push(o[0], o[1], best);
    }
    return ds;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

DataSet load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_line(line);
    int label_idx = -1;
    std::vector<int> feature_idx;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!label_column.empty() && trimmed(header[i]) == label_column) {
            label_idx = static_cast<int>(i);
        } else {
            feature_idx.push_back(static_cast<int>(i));
        }
    }
    if (!label_column.empty() && label_idx < 0)
        throw std::runtime_error("load_csv: label column '" + label_column + "' not found in " + path);
    if (feature_idx.empty()) throw std::runtime_error("load_csv: no feature columns in " + path);

    DataSet ds;
    ds.dim = static_cast<int>(feature_idx.size());
    std::map<std::string, int> name_to_id;

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (int fi : feature_idx) {
            const std::string cell = trimmed(cells[fi]);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw std::runtime_error("load_csv: row " + std::to_string(row) + ", column '" +
                                         trimmed(header[fi]) + "': '" + cell + "' is not numeric");
            ds.points.push_back(v);
        }
        if (label_idx >= 0) {
            const std::string token = trimmed(cells[label_idx]);
            auto it = name_to_id.find(token);
            if (it == name_to_id.end()) {
                it = name_to_id.emplace(token, static_cast<int>(ds.label_names.size())).first;
                ds.label_names.push_back(token);
            }
            ds.labels.push_back(it->second);
        }
    }
    ds.n = static_cast<int>(ds.points.size() / ds.dim);
    if (ds.n == 0) throw std::runtime_error("load_csv: " + path + " has no data rows");
    return ds;
}

void save_csv(const DataSet& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot write " + path);
    out.precision(17);
    for (int j = 0; j < ds.dim; ++j) {
        if (j) out << ',';
        out << 'x' << j;
    }
    if (ds.has_labels()) out << ",label";
    out << '\n';
    for (int i = 0; i < ds.n; ++i) {
        for (int j = 0; j < ds.dim; ++j) {
            if (j) out << ',';
            out << ds.coord(i, j);
        }
        if (ds.has_labels()) {
            const int l = ds.labels[i];
            out << ',' << (l < static_cast<int>(ds.label_names.size()) ? ds.label_names[l] : std::to_string(l));
        }
        out << '\n';
    }
}

DataSet subsample_unbalanced(const DataSet& ds, const std::map<int, int>& per_class, std::uint64_t seed) {
    if (!ds.has_labels()) throw std::invalid_argument("subsample_unbalanced: dataset has no labels");
    std::vector<std::vector<int>> by_class(ds.num_classes());
    for (int i = 0; i < ds.n; ++i) by_class[ds.labels[i]].push_back(i);

    Rng rng(seed);
    std::vector<int> chosen;
    for (const auto& [cls, count] : per_class) {
        if (cls < 0 || cls >= static_cast<int>(by_class.size()))
            throw std::invalid_argument("subsample_unbalanced: class " + std::to_string(cls) + " not present");
        const auto& pool = by_class[cls];
        if (count > static_cast<int>(pool.size()))
            throw std::invalid_argument("subsample_unbalanced: class " + std::to_string(cls) + " has " +
                                        std::to_string(pool.size()) + " points, requested " + std::to_string(count));
        Rng sub = rng.fork(static_cast<std::uint64_t>(cls));
        for (int idx : sub.sample_without_replacement(static_cast<int>(pool.size()), count)) {
            chosen.push_back(pool[idx]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return ds.subset(chosen);
}

LabeledSplit make_labeled_split(const DataSet& ds, int num_labeled, std::uint64_t seed) {
    if (!ds.has_labels()) throw std::invalid_argument("make_labeled_split: dataset has no labels");
    const int c = ds.num_classes();
    if (num_labeled < c)
        throw std::invalid_argument("make_labeled_split: num_labeled must be >= number of classes");
    if (num_labeled > ds.n)
        throw std::invalid_argument("make_labeled_split: num_labeled exceeds dataset size");

    Rng rng(seed);
    std::vector<int> picked;
    bool ok = false;
    // Uniform draws, rejecting sets that miss a class; stratified fallback
    // when the acceptance probability is too small for rejection to finish.
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
        picked = rng.sample_without_replacement(ds.n, num_labeled);
        std::vector<char> seen(c, 0);
        for (int id : picked) seen[ds.labels[id]] = 1;
        ok = std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
    }
    if (!ok) {
        std::vector<std::vector<int>> by_class(c);
        for (int i = 0; i < ds.n; ++i) by_class[ds.labels[i]].push_back(i);
        picked.clear();
        std::vector<char> taken(ds.n, 0);
        for (int j = 0; j < c; ++j) {
            const int pick = by_class[j][rng.below(by_class[j].size())];
            picked.push_back(pick);
            taken[pick] = 1;
        }
        std::vector<int> rest;
        for (int i = 0; i < ds.n; ++i) {
            if (!taken[i]) rest.push_back(i);
        }
        for (int idx : rng.sample_without_replacement(static_cast<int>(rest.size()), num_labeled - c)) {
            picked.push_back(rest[idx]);
        }
    }

    std::sort(picked.begin(), picked.end());
    LabeledSplit split;
    split.labeled = picked;
    std::vector<char> is_labeled(ds.n, 0);
    for (int id : picked) is_labeled[id] = 1;
    for (int i = 0; i < ds.n; ++i) {
        if (!is_labeled[i]) split.unlabeled.push_back(i);
    }
    return split;
}

}  // namespace rmd
