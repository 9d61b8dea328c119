#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mocomp/motion.hpp"

namespace mocomp {

enum class EmbeddingMethod { Umap, Pca };

struct EmbeddingParams {
    int n_neighbors = 15;
    double min_dist = 0.1;
    int n_epochs = 200;
    std::uint64_t seed = 42;
    EmbeddingMethod method = EmbeddingMethod::Umap;

    /// Throws InvalidArgument when a field is outside its domain.
    void check() const;
};

using Point2 = std::array<double, 2>;

/// 2D coordinates for every input configuration, all motions in one space.
struct Embedding {
    std::vector<Point2> points;
    std::vector<double> timestamps;
    /// [begin, end) into points for each input motion.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
};

/// Throws JointCountMismatch when motions disagree on n, TooFewSamples when
/// UMAP gets fewer than n_neighbors + 1 samples in total.
Embedding embed_joint_states(const std::vector<JointTrajectory>& motions, const EmbeddingParams& params);

/// UMAP layout of raw rows. Identical rows are embedded once and share coordinates.
std::vector<Point2> umap_layout(const std::vector<std::vector<double>>& rows, const EmbeddingParams& params);

/// Parameters (a, b) of 1 / (1 + a d^2b) fitted by least squares to the
/// offset-exponential target curve defined by min_dist and spread.
std::pair<double, double> fit_ab(double min_dist, double spread = 1.0);

struct PcaResult {
    std::vector<Point2> points;
    Eigen::VectorXd mean;
    /// d x 2, columns are the leading principal directions.
    Eigen::MatrixXd components;
    /// Covariance eigenvalues (population normalization), descending.
    Eigen::VectorXd eigenvalues;
};

/// Leading two principal components; each direction's largest-magnitude loading is positive.
PcaResult pca_2d(const std::vector<std::vector<double>>& rows);

/// Rank-based neighborhood preservation score in [0, 1]. Requires 1 <= k < n / 2
/// (otherwise InvalidK).
double trustworthiness(const std::vector<std::vector<double>>& high, const std::vector<Point2>& low, std::size_t k);
double trustworthiness(const std::vector<std::vector<double>>& high, const Embedding& low, std::size_t k);

struct JointTrace {
    std::vector<double> timestamps;
    std::vector<Point2> points;
};

/// One motion's embedded points in time order. Throws IndexOutOfRange.
JointTrace joint_trace_polyline(const Embedding& embedding, std::size_t motion_index);

}  // namespace mocomp
