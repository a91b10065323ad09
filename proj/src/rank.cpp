#include "rmd/rank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace rmd {

int StatisticSpec::max_neighbor_order() const {
    switch (kind) {
        case StatKind::eps_count: return 0;
        case StatKind::lnn_distance: return l;
        case StatKind::avg_lnn_distance: return l + l / 2;
    }
    return 0;
}

void StatisticSpec::validate() const {
    if (kind == StatKind::eps_count) {
        if (eps <= 0) throw std::invalid_argument("StatisticSpec: eps must be positive");
    } else {
        if (l < 1) throw std::invalid_argument("StatisticSpec: l must be >= 1");
    }
}

namespace {

double sq_dist(std::span<const double> a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

// Ascending distances from u to refset, self excluded.
std::vector<double> neighbor_distances(std::span<const double> u, const DataSet& refset,
                                       int self_index, int needed) {
    std::vector<double> d2;
    d2.reserve(refset.n);
    for (int i = 0; i < refset.n; ++i) {
        if (i == self_index) continue;
        d2.push_back(sq_dist(u, refset.points.data() + static_cast<std::size_t>(i) * refset.dim, refset.dim));
    }
    if (needed < static_cast<int>(d2.size())) {
        std::nth_element(d2.begin(), d2.begin() + (needed - 1), d2.end());
        d2.resize(needed);
    }
    std::sort(d2.begin(), d2.end());
    for (double& v : d2) v = std::sqrt(v);
    return d2;
}

}  // namespace

double statistic(std::span<const double> u, const DataSet& refset, const StatisticSpec& spec,
                 int self_index) {
    spec.validate();
    if (static_cast<int>(u.size()) != refset.dim)
        throw std::invalid_argument("statistic: query dimension does not match refset");

    if (spec.kind == StatKind::eps_count) {
        const double eps2 = spec.eps * spec.eps;
        int count = 0;
        for (int i = 0; i < refset.n; ++i) {
            if (i == self_index) continue;
            if (sq_dist(u, refset.points.data() + static_cast<std::size_t>(i) * refset.dim, refset.dim) <= eps2)
                ++count;
        }
        return -static_cast<double>(count);
    }

    const int available = refset.n - (self_index >= 0 ? 1 : 0);
    const int hi = spec.max_neighbor_order();
    if (hi > available)
        throw std::invalid_argument("statistic: l requires " + std::to_string(hi) +
                                    " neighbors, refset provides " + std::to_string(available));

    const std::vector<double> dist = neighbor_distances(u, refset, self_index, hi);
    if (spec.kind == StatKind::lnn_distance) return dist[spec.l - 1];

    // Average of the window around the l-th neighbor; the window always
    // holds exactly l entries.
    const int lo = spec.l - (spec.l - 1) / 2;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double w = spec.weighted
                             ? std::pow(static_cast<double>(spec.l) / i, 1.0 / refset.dim)
                             : 1.0;
        sum += w * dist[i - 1];
    }
    return sum / spec.l;
}

namespace {

// Eq-style rank: fraction of reference statistics >= each query statistic.
std::vector<double> ranks_from_statistics(const std::vector<double>& query,
                                          std::vector<double> reference) {
    std::sort(reference.begin(), reference.end());
    const double n = static_cast<double>(reference.size());
    std::vector<double> out(query.size());
    for (std::size_t i = 0; i < query.size(); ++i) {
        const auto lower =
            std::lower_bound(reference.begin(), reference.end(), query[i]) - reference.begin();
        out[i] = (n - static_cast<double>(lower)) / n;
    }
    return out;
}

}  // namespace

RankVector rank_all(const DataSet& ds, const StatisticSpec& spec) {
    ds.validate();
    std::vector<double> g(ds.n);
    for (int i = 0; i < ds.n; ++i) g[i] = statistic(ds.point(i), ds, spec, i);
    RankVector rv;
    rv.values = ranks_from_statistics(g, g);
    rv.statistic = spec;
    return rv;
}

RankVector rank_ustat(const DataSet& ds, const StatisticSpec& spec, int b, std::uint64_t seed) {
    ds.validate();
    if (ds.n < 4) throw std::invalid_argument("rank_ustat: need at least 4 points");
    if (b < 1) throw std::invalid_argument("rank_ustat: b must be >= 1");

    std::vector<double> sum(ds.n, 0.0);
    std::vector<int> rounds(ds.n, 0);
    Rng rng(seed);

    std::vector<int> order(ds.n);
    std::iota(order.begin(), order.end(), 0);
    const int m = ds.n / 2;

    for (int round = 0; round < b; ++round) {
        Rng r = rng.fork(round);
        r.shuffle(order);
        // Odd n: the trailing point sits this round out.
        const std::vector<int> half_a(order.begin(), order.begin() + m);
        const std::vector<int> half_b(order.begin() + m, order.begin() + 2 * m);
        const DataSet ds_a = ds.subset(half_a);
        const DataSet ds_b = ds.subset(half_b);

        auto accumulate = [&](const std::vector<int>& own_ids, const DataSet& own,
                              const DataSet& other) {
            std::vector<double> g(own.n);
            for (int i = 0; i < own.n; ++i) g[i] = statistic(own.point(i), other, spec);
            const std::vector<double> ranks = ranks_from_statistics(g, g);
            for (int i = 0; i < own.n; ++i) {
                sum[own_ids[i]] += ranks[i];
                rounds[own_ids[i]] += 1;
            }
        };
        accumulate(half_a, ds_a, ds_b);
        accumulate(half_b, ds_b, ds_a);
    }

    RankVector rv;
    rv.values.resize(ds.n);
    for (int i = 0; i < ds.n; ++i) {
        // A point can miss every round only for odd n with tiny b.
        rv.values[i] = rounds[i] > 0 ? sum[i] / rounds[i] : 0.5;
    }
    rv.statistic = spec;
    rv.resampled = true;
    rv.b = b;
    return rv;
}

PValueEstimator::PValueEstimator(const MixtureSpec& spec, int mc_samples, std::uint64_t seed)
    : spec_(spec) {
    spec_.validate();
    if (spec_.dim() == 1 && spec_.components.size() == 1) {
        analytic_ = true;
        mu_ = spec_.components[0].mean[0];
        sigma_ = spec_.marginal_sigma(0, 0);
        return;
    }
    if (mc_samples < 1) throw std::invalid_argument("PValueEstimator: mc_samples must be >= 1");
    const DataSet sample = gen_mixture(spec_, std::max(2, mc_samples), seed);
    sorted_densities_.resize(sample.n);
    for (int i = 0; i < sample.n; ++i) sorted_densities_[i] = spec_.density(sample.point(i));
    std::sort(sorted_densities_.begin(), sorted_densities_.end());
}

double PValueEstimator::operator()(std::span<const double> u) const {
    if (analytic_) {
        return 2.0 * normal_cdf(-std::abs(u[0] - mu_) / sigma_);
    }
    const double fu = spec_.density(u);
    const auto le = std::upper_bound(sorted_densities_.begin(), sorted_densities_.end(), fu) -
                    sorted_densities_.begin();
    return static_cast<double>(le) / static_cast<double>(sorted_densities_.size());
}

double pvalue_oracle(std::span<const double> u, const MixtureSpec& spec, int mc_samples,
                     std::uint64_t seed) {
    return PValueEstimator(spec, mc_samples, seed)(u);
}

void save_rank_csv(const RankVector& ranks, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_rank_csv: cannot write " + path);
    out.precision(17);
    out << "index,rank\n";
    for (std::size_t i = 0; i < ranks.values.size(); ++i) {
        out << i << ',' << ranks.values[i] << '\n';
    }
}

}  // namespace rmd
