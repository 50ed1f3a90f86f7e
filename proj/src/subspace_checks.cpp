#include "mixclust/subspace_checks.hpp"

#include <cmath>

#include "mixclust/dimred.hpp"
#include "mixclust/errors.hpp"

namespace mixclust {

namespace {

Matrix cluster_means(const Matrix& v, const Clustering& c, std::vector<double>& counts) {
    Matrix means = Matrix::Zero(v.rows(), c.k());
    counts.assign(static_cast<std::size_t>(c.k()), 0.0);
    for (std::size_t n = 0; n < c.size(); ++n) {
        means.col(c[n]) += v.col(static_cast<Eigen::Index>(n));
        counts[static_cast<std::size_t>(c[n])] += 1.0;
    }
    for (int j = 0; j < c.k(); ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0.0) {
            means.col(j) /= counts[static_cast<std::size_t>(j)];
        }
    }
    return means;
}

void check_sizes(const Matrix& v, const Clustering& c) {
    if (static_cast<std::size_t>(v.cols()) != c.size()) {
        throw ValidationError("clustering size does not match the number of samples");
    }
}

}  // namespace

Vector within_cluster_subspace_variance(const Matrix& v, const Clustering& c, const Matrix& basis) {
    check_sizes(v, c);
    std::vector<double> counts;
    const Matrix means = cluster_means(v, c, counts);
    const Eigen::Index d = basis.cols();
    std::vector<Matrix> scatter(static_cast<std::size_t>(c.k()), Matrix::Zero(d, d));
    for (std::size_t n = 0; n < c.size(); ++n) {
        const Vector y = basis.transpose() * (v.col(static_cast<Eigen::Index>(n)) - means.col(c[n]));
        scatter[static_cast<std::size_t>(c[n])].noalias() += y * y.transpose();
    }
    Vector out = Vector::Zero(c.k());
    for (int j = 0; j < c.k(); ++j) {
        const double nk = counts[static_cast<std::size_t>(j)];
        if (nk == 0.0 || d == 0) continue;
        out(j) = std::max(sym_eigenvalues(scatter[static_cast<std::size_t>(j)] / nk)(0), 0.0);
    }
    return out;
}

Vector centroid_subspace_residuals(const Matrix& v, const Clustering& c, const Matrix& basis) {
    check_sizes(v, c);
    std::vector<double> counts;
    const Matrix means = cluster_means(v, c, counts);
    const Vector overall = v.rowwise().mean();
    Vector out(c.k());
    for (int j = 0; j < c.k(); ++j) {
        const Vector centred = means.col(j) - overall;
        out(j) = (centred - basis * (basis.transpose() * centred)).squaredNorm();
    }
    return out;
}

InequalitySides centroid_subspace_inequality(const Matrix& v, const Clustering& target) {
    const int k = target.k();
    if (k < 2) throw ValidationError("centroid_subspace_inequality: need K >= 2");
    const Matrix w = pca_reduce(v, k - 1).basis;
    const Vector resid = centroid_subspace_residuals(v, target, w);
    const Vector var = within_cluster_subspace_variance(v, target, w);
    const auto sizes = target.cluster_sizes();
    InequalitySides s;
    for (int j = 0; j < k; ++j) {
        const double nk = static_cast<double>(sizes[static_cast<std::size_t>(j)]);
        s.lhs += nk * resid(j);
        s.rhs += nk * var(j);
    }
    s.rhs *= static_cast<double>(k - 1);
    return s;
}

Matrix mean_scatter_basis(const MixtureModel& model) {
    return top_eigenvectors(population_moments(model).sigma_bar0, model.k() - 1);
}

InequalitySides mean_subspace_inequality(const MixtureModel& model, const Matrix& v) {
    const int k = model.k();
    if (k < 2) throw ValidationError("mean_subspace_inequality: need K >= 2");
    const PopulationMoments m = population_moments(model);
    if (!(m.lambda_min > 0.0)) throw ValidationError("mean_subspace_inequality: lambda_min is zero");
    const Matrix p = pca_reduce(v, k - 1).basis;
    const Matrix q = top_eigenvectors(m.sigma_bar0, k - 1);
    double weighted = 0.0;
    for (int j = 0; j < k; ++j) {
        const Vector centred = model.means().col(j) - m.mean;
        weighted += model.weights()(j) * (centred - p * (p.transpose() * centred)).squaredNorm();
    }
    const double dist = projector_distance(p, q);
    return InequalitySides{dist * dist, 2.0 * weighted / m.lambda_min};
}

InequalitySides covariance_perturbation_inequality(const MixtureModel& model, const Matrix& v,
                                                   double* epsilon) {
    const int k = model.k();
    if (k < 2) throw ValidationError("covariance_perturbation_inequality: need K >= 2");
    const PopulationMoments m = population_moments(model);
    if (!(m.lambda_min > 0.0)) {
        throw ValidationError("covariance_perturbation_inequality: lambda_min is zero");
    }
    const Matrix z = center(v).z;
    const Matrix sample_cov = (z * z.transpose()) / static_cast<double>(z.cols());
    const double eps = spectral_norm_symmetric(sample_cov - m.sigma_bar);
    if (epsilon != nullptr) *epsilon = eps;
    const Matrix p = top_eigenvectors(sample_cov, k - 1);
    const Matrix q = top_eigenvectors(m.sigma_bar0, k - 1);
    return InequalitySides{projector_distance(p, q),
                           4.0 * std::sqrt(static_cast<double>(k)) * eps / m.lambda_min};
}

}  // namespace mixclust
