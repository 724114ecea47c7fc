// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace geodiv {

class SimilarityEngine;

struct ProjectedPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

struct PcaProjection {
    std::string topic;
    std::vector<ProjectedPoint> points;
    std::array<double, 2> explained_variance_ratio{};
    std::size_t mean_vector_dim = 0;
    /// Unit principal axes in input space; sign fixed so the largest-magnitude
    /// entry of each axis is positive.
    std::array<std::vector<double>, 2> components;
};

using LabeledVector = std::pair<std::string, std::vector<double>>;

/// Centers the inputs and projects them onto the top two eigenvectors of the
/// sample covariance, decomposing whichever of the Gram (n x n) or covariance
/// (d x d) matrix is smaller. Throws DomainError on fewer than two inputs or a
/// dimension mismatch, DegenerateError when every input is identical.
PcaProjection pca2d(const std::vector<LabeledVector>& vectors);

/// PCA of one topic's country centroids under `rep`, plus the pooled
/// high-resource centroid when `include_high` and it exists.
PcaProjection project_topic(const SimilarityEngine& engine, const std::string& topic, const std::string& rep,
                            bool include_high);

}  // namespace geodiv
