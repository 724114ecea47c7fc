// SPDX-License-Identifier: Apache-2.0
#include "geodiv/projection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "geodiv/error.hpp"
#include "geodiv/similarity.hpp"

namespace geodiv {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

}  // namespace

PcaProjection pca2d(const std::vector<LabeledVector>& vectors) {
    if (vectors.size() < 2) throw DomainError("pca2d: need at least two vectors");
    const auto n = static_cast<Eigen::Index>(vectors.size());
    const auto d = static_cast<Eigen::Index>(vectors.front().second.size());
    if (d == 0) throw DomainError("pca2d: empty vectors");

    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& v = vectors[static_cast<std::size_t>(i)].second;
        if (static_cast<Eigen::Index>(v.size()) != d) throw DomainError("pca2d: dimension mismatch");
        X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), d);
    }
    const double scale = X.cwiseAbs().maxCoeff();
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;

    // Centering identical rows can leave rounding residue of order eps * scale.
    const double total = X.squaredNorm();
    const double floor = static_cast<double>(n * d) * std::pow(1e-12 * scale, 2);
    if (!(total > floor)) throw DegenerateError("pca2d: all inputs are identical");

    // Top two eigenpairs of X^T X, via the smaller of the two Gram forms.
    Eigen::MatrixXd axes(d, 2);
    Eigen::Vector2d lambda;
    if (n <= d) {
        const Eigen::MatrixXd gram = X * X.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw DegenerateError("pca2d: eigendecomposition failed");
        for (int k = 0; k < 2; ++k) {
            const Eigen::Index col = n - 1 - k;
            lambda(k) = std::max(0.0, es.eigenvalues()(col));
            Eigen::VectorXd axis = X.transpose() * es.eigenvectors().col(col);
            const double len = axis.norm();
            // A zero eigenvalue leaves the axis undetermined; any unit vector
            // orthogonal to the first axis projects everything to zero.
            if (len > 1e-12 * std::sqrt(total)) {
                axis /= len;
            } else {
                axis = Eigen::VectorXd::Zero(d);
                for (Eigen::Index j = 0; j < d && axis.norm() == 0.0; ++j) {
                    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, j);
                    if (k == 1) e -= axes.col(0).dot(e) * axes.col(0);
                    if (e.norm() > 1e-6) axis = e.normalized();
                }
            }
            axes.col(k) = axis;
        }
    } else {
        const Eigen::MatrixXd cov = X.transpose() * X;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw DegenerateError("pca2d: eigendecomposition failed");
        for (int k = 0; k < 2; ++k) {
            const Eigen::Index col = d - 1 - k;
            lambda(k) = std::max(0.0, es.eigenvalues()(col));
            axes.col(k) = es.eigenvectors().col(col);
        }
    }

    PcaProjection out;
    out.mean_vector_dim = static_cast<std::size_t>(d);
    for (int k = 0; k < 2; ++k) {
        fix_sign(axes.col(k));
        out.explained_variance_ratio[static_cast<std::size_t>(k)] = lambda(k) / total;
        out.components[static_cast<std::size_t>(k)].assign(axes.col(k).data(), axes.col(k).data() + d);
    }
    const Eigen::MatrixXd proj = X * axes;
    for (Eigen::Index i = 0; i < n; ++i)
        out.points.push_back({vectors[static_cast<std::size_t>(i)].first, proj(i, 0), proj(i, 1)});
    return out;
}

PcaProjection project_topic(const SimilarityEngine& engine, const std::string& topic, const std::string& rep,
                            bool include_high) {
    std::vector<LabeledVector> vectors;
    for (const auto& c : engine.store().countries_for(topic, rep))
        if (const auto* cen = engine.find(GroupKey::low(topic, c, rep))) vectors.emplace_back(c, cen->direction);
    if (include_high)
        if (const auto* cen = engine.find(GroupKey::high(topic, rep)))
            vectors.emplace_back(std::string(kHighLabel), cen->direction);
    if (vectors.size() < 2)
        throw InsufficientDataError(fmt::format("pca: topic '{}' has {} centroid(s) under '{}'", topic, vectors.size(), rep));
    auto p = pca2d(vectors);
    p.topic = topic;
    return p;
}

}  // namespace geodiv
