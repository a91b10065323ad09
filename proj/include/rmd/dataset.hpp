#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmd/common.hpp"

namespace rmd {

/// Point cloud with optional per-point class labels.
/// Points are stored row-major, n x dim.
struct DataSet {
    std::vector<double> points;
    std::vector<int> labels;              // empty when unlabeled, else size n
    std::vector<std::string> label_names; // original label tokens, index = class id
    int n = 0;
    int dim = 0;

    bool has_labels() const { return !labels.empty(); }
    int num_classes() const;

    std::span<const double> point(int i) const {
        return {points.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    double coord(int i, int axis) const {
        return points[static_cast<std::size_t>(i) * dim + axis];
    }

    /// Rows of this dataset selected by index, labels carried along.
    DataSet subset(const std::vector<int>& ids) const;

    void validate() const;
};

struct GaussianComponent {
    double weight = 1.0;
    std::vector<double> mean;
    std::vector<double> cov;  // dim x dim row-major, symmetric positive-definite
};

/// Gaussian mixture density. Weights must sum to one, covariances must be SPD.
struct MixtureSpec {
    std::vector<GaussianComponent> components;

    int dim() const;
    void validate() const;

    double density(std::span<const double> x) const;
    /// Mass of the half-space {x : x[axis] <= t}.
    double side_mass(int axis, double t) const;
    /// Marginal standard deviation of component c along axis.
    double marginal_sigma(int c, int axis) const;

    static MixtureSpec single(std::vector<double> mean, std::vector<double> cov, double weight = 1.0);
};

struct LabeledSplit {
    std::vector<int> labeled;
    std::vector<int> unlabeled;
};

/// Arc-plus-blobs scene geometry; defaults match the bundled presets.
struct BananaSceneConfig {
    std::array<double, 2> blob1_mean{-1.3, 0.6};
    std::array<double, 2> blob2_mean{1.3, 0.6};
    double blob_sigma = 0.45;
    std::array<double, 2> arc_center{0.0, 1.2};
    double arc_radius = 3.0;
    double arc_from = M_PI + 0.35;  // angles swept by the crescent
    double arc_to = 2.0 * M_PI - 0.35;
    double arc_noise = 0.22;
};

DataSet gen_mixture(const MixtureSpec& spec, int n, std::uint64_t seed);

/// Two Gaussian blobs, one crescent, plus hand-placed outlier points that get
/// the label of the nearest generated point.
DataSet gen_banana_scene(const std::array<int, 3>& n_per_cluster,
                         const std::vector<std::array<double, 2>>& outliers,
                         std::uint64_t seed,
                         const BananaSceneConfig& config = {});

DataSet load_csv(const std::string& path, const std::string& label_column = "");
void save_csv(const DataSet& ds, const std::string& path);

DataSet subsample_unbalanced(const DataSet& ds, const std::map<int, int>& per_class, std::uint64_t seed);

LabeledSplit make_labeled_split(const DataSet& ds, int num_labeled, std::uint64_t seed);

}  // namespace rmd
