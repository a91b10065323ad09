#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmd/dataset.hpp"

namespace rmd {

enum class StatKind { eps_count, lnn_distance, avg_lnn_distance };

/// Per-point statistic used for rank computation. Large values of the
/// statistic mean locally sparse data, so low rank marks density valleys.
struct StatisticSpec {
    StatKind kind = StatKind::avg_lnn_distance;
    double eps = 1.0;      // eps_count radius
    int l = 50;            // neighbor order for the NN kinds
    bool weighted = false; // (l/i)^(1/d) weights on the averaged window

    /// Highest neighbor order the statistic reads.
    int max_neighbor_order() const;
    void validate() const;
};

struct RankVector {
    std::vector<double> values;  // in [0,1], length n
    StatisticSpec statistic;
    bool resampled = false;
    int b = 0;  // resample count when resampled
};

/// G(u) against refset. Pass self_index >= 0 when u is refset point
/// self_index so it does not count as its own neighbor.
double statistic(std::span<const double> u, const DataSet& refset, const StatisticSpec& spec,
                 int self_index = -1);

/// Empirical rank of every point within ds: the fraction of points whose
/// statistic is >= the point's own (self included).
RankVector rank_all(const DataSet& ds, const StatisticSpec& spec);

/// Averaged ranks over b random half-splits: each half's statistics are
/// computed against the other half, ranks are taken within the own half.
RankVector rank_ustat(const DataSet& ds, const StatisticSpec& spec, int b, std::uint64_t seed);

/// Shared Monte Carlo machinery for p(u) = P(f(X) <= f(u)). A 1D single
/// Gaussian is evaluated in closed form instead of sampling.
class PValueEstimator {
public:
    PValueEstimator(const MixtureSpec& spec, int mc_samples, std::uint64_t seed);
    double operator()(std::span<const double> u) const;

private:
    MixtureSpec spec_;
    bool analytic_ = false;
    double mu_ = 0.0, sigma_ = 1.0;
    std::vector<double> sorted_densities_;
};

constexpr int kDefaultPValueSamples = 200000;

double pvalue_oracle(std::span<const double> u, const MixtureSpec& spec, int mc_samples,
                     std::uint64_t seed);

/// CSV export: "index,rank" with a header row.
void save_rank_csv(const RankVector& ranks, const std::string& path);

}  // namespace rmd
