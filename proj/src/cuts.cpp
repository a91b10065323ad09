#include "rmd/cuts.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace rmd {

void Partition::validate(int n) const {
    if (static_cast<int>(assignment.size()) != n)
        throw std::invalid_argument("Partition: assignment length does not match graph");
    if (num_clusters < 2) throw std::invalid_argument("Partition: need at least 2 clusters");
    std::vector<int> counts(num_clusters, 0);
    for (int a : assignment) {
        if (a < 0 || a >= num_clusters) throw std::invalid_argument("Partition: cluster id out of range");
        ++counts[a];
    }
    for (int c = 0; c < num_clusters; ++c) {
        if (counts[c] == 0)
            throw std::invalid_argument("Partition: cluster " + std::to_string(c) + " is empty");
    }
}

Partition Partition::from_labels(const std::vector<int>& labels) {
    Partition p;
    p.assignment.reserve(labels.size());
    std::vector<int> remap;
    for (int l : labels) {
        auto it = std::find(remap.begin(), remap.end(), l);
        if (it == remap.end()) {
            remap.push_back(l);
            it = remap.end() - 1;
        }
        p.assignment.push_back(static_cast<int>(it - remap.begin()));
    }
    p.num_clusters = static_cast<int>(remap.size());
    return p;
}

CutReport cut_metrics(const SparseGraph& g, const Partition& p) {
    p.validate(g.n);
    const int c = p.num_clusters;
    CutReport rep;
    rep.cluster_sizes.assign(c, 0);
    rep.cluster_volumes.assign(c, 0.0);
    std::vector<double> boundary(c, 0.0);  // weight leaving each cluster

    for (int i = 0; i < g.n; ++i) {
        ++rep.cluster_sizes[p.assignment[i]];
        rep.cluster_volumes[p.assignment[i]] += g.volume(i);
    }
    for (int i = 0; i < g.n; ++i) {
        for (const auto& [j, w] : g.adj[i]) {
            if (j <= i) continue;
            if (p.assignment[i] != p.assignment[j]) {
                rep.cut += w;
                boundary[p.assignment[i]] += w;
                boundary[p.assignment[j]] += w;
            }
        }
    }
    for (int a = 0; a < c; ++a) {
        rep.ratio_cut += boundary[a] / rep.cluster_sizes[a];
        // A zero-volume cluster has no incident edges at all.
        if (rep.cluster_volumes[a] > 0) rep.ncut += boundary[a] / rep.cluster_volumes[a];
    }
    return rep;
}

int CutCurve::argmin(CutMetric metric, int min_side) const {
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& rep = values[i];
        const int small_side = *std::min_element(rep.cluster_sizes.begin(), rep.cluster_sizes.end());
        if (small_side < min_side) continue;
        double v = 0.0;
        switch (metric) {
            case CutMetric::cut: v = rep.cut; break;
            case CutMetric::ratio_cut: v = rep.ratio_cut; break;
            case CutMetric::ncut: v = rep.ncut; break;
        }
        if (v < best_val) {
            best_val = v;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw std::runtime_error("CutCurve::argmin: no threshold satisfies the side constraint");
    return best;
}

CutCurve hyperplane_sweep(const SparseGraph& g, const DataSet& ds, int axis, int grid) {
    ds.validate();
    if (g.n != ds.n) throw std::invalid_argument("hyperplane_sweep: graph does not match dataset");
    if (axis < 0 || axis >= ds.dim) throw std::invalid_argument("hyperplane_sweep: axis out of range");
    if (grid < 2) throw std::invalid_argument("hyperplane_sweep: grid must be >= 2");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ds.n; ++i) {
        lo = std::min(lo, ds.coord(i, axis));
        hi = std::max(hi, ds.coord(i, axis));
    }
    if (lo == hi) throw std::invalid_argument("hyperplane_sweep: axis is degenerate (all values equal)");

    CutCurve curve;
    curve.axis = axis;
    Partition p;
    p.num_clusters = 2;
    p.assignment.resize(ds.n);
    for (int gidx = 0; gidx < grid; ++gidx) {
        const double t = lo + (hi - lo) * gidx / (grid - 1);
        int left = 0;
        for (int i = 0; i < ds.n; ++i) {
            const bool is_left = ds.coord(i, axis) <= t;
            p.assignment[i] = is_left ? 0 : 1;
            left += is_left ? 1 : 0;
        }
        if (left == 0 || left == ds.n) continue;
        curve.thresholds.push_back(t);
        curve.values.push_back(cut_metrics(g, p));
    }
    return curve;
}

double unit_ball_volume(int d) {
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double limit_cut_constant(int d) {
    return 2.0 * unit_ball_volume(d - 1) /
           ((d + 1) * std::pow(unit_ball_volume(d), 1.0 + 1.0 / d));
}

namespace {

// Adaptive Simpson with an absolute budget derived from the first estimate.
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adapt(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-12);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

using SlicePoint = std::function<double(std::span<const double>)>;

// Integral over the hyperplane {x_axis = t} of f^{1-1/d} * extra(x), where
// extra is an optional additional factor of the integrand.
double slice_integral(const MixtureSpec& spec, int axis, double t, const SlicePoint* extra) {
    const int d = spec.dim();
    const double f_exp = 1.0 - 1.0 / d;

    if (d == 1) {
        const double x = t;
        double v = std::pow(spec.density(std::span<const double>(&x, 1)), f_exp);
        if (extra) v *= (*extra)(std::span<const double>(&x, 1));
        return v;
    }

    if (d == 2) {
        const int free_axis = axis == 0 ? 1 : 0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            const double mu = spec.components[c].mean[free_axis];
            const double sd = spec.marginal_sigma(static_cast<int>(c), free_axis);
            lo = std::min(lo, mu - 10.0 * sd);
            hi = std::max(hi, mu + 10.0 * sd);
        }
        auto integrand = [&](double u) {
            double x[2];
            x[axis] = t;
            x[free_axis] = u;
            double v = std::pow(spec.density(std::span<const double>(x, 2)), f_exp);
            if (extra) v *= (*extra)(std::span<const double>(x, 2));
            return v;
        };
        return adaptive_simpson(integrand, lo, hi, 1e-4);
    }

    // d > 2: importance-sampled Monte Carlo over the slice, proposal = the
    // mixture's marginal on the slice coordinates.
    const int ds = d - 1;
    std::vector<int> free_axes;
    for (int a = 0; a < d; ++a) {
        if (a != axis) free_axes.push_back(a);
    }
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> chols;
    std::vector<double> logdets;
    for (const auto& comp : spec.components) {
        Eigen::VectorXd mu(ds);
        Eigen::MatrixXd cov(ds, ds);
        for (int a = 0; a < ds; ++a) {
            mu[a] = comp.mean[free_axes[a]];
            for (int b = 0; b < ds; ++b) {
                cov(a, b) = comp.cov[static_cast<std::size_t>(free_axes[a]) * d + free_axes[b]];
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        means.push_back(mu);
        chols.push_back(llt.matrixL());
        double logdet = 0.0;
        for (int a = 0; a < ds; ++a) logdet += std::log(chols.back()(a, a));
        logdets.push_back(logdet);
    }
    auto proposal_density = [&](const Eigen::VectorXd& s) {
        double q = 0.0;
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            const Eigen::VectorXd z = chols[c].triangularView<Eigen::Lower>().solve(s - means[c]);
            q += spec.components[c].weight *
                 std::exp(-0.5 * z.squaredNorm() - logdets[c] - 0.5 * ds * std::log(2.0 * M_PI));
        }
        return q;
    };

    const int samples = 200000;
    Rng rng(99173);
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& comp : spec.components) cum.push_back(acc += comp.weight);
    cum.back() = 1.0;

    double sum = 0.0;
    Eigen::VectorXd z(ds), s(ds);
    std::vector<double> x(d);
    for (int it = 0; it < samples; ++it) {
        const double u = rng.uniform();
        int comp = 0;
        while (u >= cum[comp] && comp + 1 < static_cast<int>(cum.size())) ++comp;
        for (int a = 0; a < ds; ++a) z[a] = rng.normal();
        s = means[comp] + chols[comp] * z;
        x[axis] = t;
        for (int a = 0; a < ds; ++a) x[free_axes[a]] = s[a];
        double v = std::pow(spec.density(x), f_exp);
        if (extra) v *= (*extra)(std::span<const double>(x.data(), d));
        sum += v / proposal_density(s);
    }
    return sum / samples;
}

double balance_factor(const MixtureSpec& spec, int axis, double t) {
    const double minus = spec.side_mass(axis, t);
    const double plus = 1.0 - minus;
    if (minus <= 0 || plus <= 0)
        throw std::invalid_argument("limit cut: hyperplane leaves an empty side");
    return 1.0 / minus + 1.0 / plus;
}

}  // namespace

double limit_ncut_knn(const MixtureSpec& spec, int axis, double t, bool balance) {
    spec.validate();
    if (axis < 0 || axis >= spec.dim()) throw std::invalid_argument("limit_ncut_knn: axis out of range");
    const double integral = slice_integral(spec, axis, t, nullptr);
    const double c = limit_cut_constant(spec.dim());
    return c * integral * (balance ? balance_factor(spec, axis, t) : 1.0);
}

double limit_ncut_rmd(const MixtureSpec& spec, int axis, double t, const DegreeScheme& scheme,
                      int pvalue_samples, std::uint64_t pvalue_seed) {
    spec.validate();
    scheme.validate();
    if (axis < 0 || axis >= spec.dim()) throw std::invalid_argument("limit_ncut_rmd: axis out of range");
    const int d = spec.dim();
    const PValueEstimator pvalue(spec, pvalue_samples, pvalue_seed);
    const double rho_exp = 1.0 + 1.0 / d;
    const SlicePoint rho = [&](std::span<const double> x) {
        return std::pow(scheme.lambda + scheme.phi_value(pvalue(x)), rho_exp);
    };
    const double integral = slice_integral(spec, axis, t, &rho);
    return limit_cut_constant(d) * integral * balance_factor(spec, axis, t);
}

void save_curve_csv(const CutCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_curve_csv: cannot write " + path);
    out.precision(17);
    out << "threshold,cut,ratio_cut,ncut,size_left\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        const auto& rep = curve.values[i];
        out << curve.thresholds[i] << ',' << rep.cut << ',' << rep.ratio_cut << ',' << rep.ncut
            << ',' << rep.cluster_sizes[0] << '\n';
    }
}

}  // namespace rmd
