#pragma once

// Sample-level quantities behind the PCA subspace inequalities for mixtures. Each
// function returns both sides of an inequality so callers can assert lhs <= rhs.

#include <algorithm>
#include <cmath>

#include "mixclust/clustering.hpp"
#include "mixclust/matrix_core.hpp"
#include "mixclust/mixture_models.hpp"

namespace mixclust {

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds(double rel_slack = 1e-9) const noexcept {
        return lhs <= rhs + rel_slack * std::max(1.0, std::abs(rhs));
    }
};

/// max over unit z in span(basis) of (1/n_k) sum_{n in C_k} (z^T (v_n - c_k))^2,
/// per cluster; empty clusters report 0.
Vector within_cluster_subspace_variance(const Matrix& v, const Clustering& c, const Matrix& basis);

/// Squared distance of every centred centroid c_k - v_bar to span(basis).
Vector centroid_subspace_residuals(const Matrix& v, const Clustering& c, const Matrix& basis);

/// sum_k n_k d(c_k - v_bar, W)^2  vs  (K-1) sum_k n_k sigma^2_{k,W}(V), with W
/// the top K-1 left singular vectors of the centred data.
InequalitySides centroid_subspace_inequality(const Matrix& v, const Clustering& target);

/// Basis of the top K-1 eigenvectors of the centred mean scatter of the model.
Matrix mean_scatter_basis(const MixtureModel& model);

/// ||P P^T - Q Q^T||_F^2  vs  2 sum_k w_k d(u_k - u_bar, W)^2 / lambda_min,
/// with P the post-(K-1)-PCA basis of V and Q the model's mean-scatter basis.
InequalitySides mean_subspace_inequality(const MixtureModel& model, const Matrix& v);

/// ||P P^T - Q Q^T||_F  vs  4 sqrt(K) ||Sigma_bar_N - Sigma_bar||_2 / lambda_min.
/// The perturbation size is also returned through `epsilon` when non-null.
InequalitySides covariance_perturbation_inequality(const MixtureModel& model, const Matrix& v,
                                                   double* epsilon = nullptr);

}  // namespace mixclust
