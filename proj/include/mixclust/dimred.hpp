#pragma once

#include <cstdint>

#include "mixclust/clustering.hpp"
#include "mixclust/matrix_core.hpp"

namespace mixclust {

enum class ReductionMethod { Pca, Svd, RandomProjection, RandomizedSvd };

const char* method_name(ReductionMethod m) noexcept;

struct ReducedDataset {
    Matrix v_tilde;            ///< d x N
    ReductionMethod method = ReductionMethod::Pca;
    Matrix basis;              ///< F x d, orthonormal columns
    Eigen::Index d = 0;
    Vector spectrum;           ///< leading eigenvalues (PCA/SVD) or singular values (randomized SVD)
};

/// Post-d-PCA data: eigendecompose the centred covariance Z Z^T / N and project
/// the *uncentred* V onto its top d eigenvectors, V~ = P_d^T V.
/// Requires 1 <= d <= F and N >= 2.
ReducedDataset pca_reduce(const Matrix& v, Eigen::Index d);

/// Post-d-SVD data: as pca_reduce but with the uncentred second moment V V^T / N.
ReducedDataset svd_reduce(const Matrix& v, Eigen::Index d);

/// Orthonormalised d x F Gaussian matrix R applied to V. Deterministic in `seed`.
ReducedDataset random_projection(const Matrix& v, Eigen::Index d, std::uint64_t seed);

/// Sketch A = L V with a D x F Gaussian L, orthonormalise the rows of A into B,
/// take the top-K left singular vectors Z_K of V B^T, and return Z_K^T V.
/// Requires K <= D <= min(F, N).
ReducedDataset randomized_svd(const Matrix& v, Eigen::Index k, Eigen::Index sketch,
                              std::uint64_t seed);

/// D(V, C_reduced) / D(V, C_opt). Returns +infinity when the denominator is
/// zero but the numerator is not, and 1 when both vanish.
double gamma_factor(const Matrix& v, const Clustering& reduced, const Clustering& opt);

/// Modified Gram-Schmidt with one re-orthogonalisation pass over the rows of
/// `m`. Rows that vanish numerically (residual below 1e-12 of their original
/// norm) are dropped, so the result has full row rank.
Matrix orthonormalize_rows(const Matrix& m);

/// Top-d eigenvectors of a symmetric matrix as an F x d orthonormal basis.
Matrix top_eigenvectors(const Matrix& symmetric, Eigen::Index d);

}  // namespace mixclust
