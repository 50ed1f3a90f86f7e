#include "mixclust/dimred.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mixclust/errors.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Matrix g(rows, cols);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        SplitMix64 rng = make_stream(seed, static_cast<std::uint64_t>(i));
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
    }
    return g;
}

Matrix second_moment(const Matrix& x) {
    Matrix m = Matrix::Zero(x.rows(), x.rows());
    m.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
    return m.selfadjointView<Eigen::Lower>();
}

ReducedDataset project_on_eigenbasis(const Matrix& v, const Matrix& moment, Eigen::Index d,
                                     ReductionMethod method) {
    const SymmetricEigen eig = sym_eigen(moment);
    ReducedDataset out;
    out.method = method;
    out.d = d;
    out.basis = eig.eigenvectors.leftCols(d);
    out.spectrum = eig.eigenvalues.head(d);
    out.v_tilde = out.basis.transpose() * v;
    return out;
}

void check_target_dim(const Matrix& v, Eigen::Index d, const char* what) {
    if (d < 1 || d > v.rows()) {
        throw ValidationError(std::string(what) + ": target dimension must lie in [1, F]");
    }
}

}  // namespace

const char* method_name(ReductionMethod m) noexcept {
    switch (m) {
        case ReductionMethod::Pca: return "pca";
        case ReductionMethod::Svd: return "svd";
        case ReductionMethod::RandomProjection: return "random_projection";
        case ReductionMethod::RandomizedSvd: return "randomized_svd";
    }
    return "unknown";
}

Matrix orthonormalize_rows(const Matrix& m) {
    Matrix q(m.rows(), m.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Vector row = m.row(i).transpose();
        const double original = row.norm();
        if (original == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < kept; ++j) {
                row -= q.row(j).dot(row) * q.row(j).transpose();
            }
        }
        const double residual = row.norm();
        if (residual <= 1e-12 * original) continue;
        q.row(kept++) = (row / residual).transpose();
    }
    return q.topRows(kept);
}

Matrix top_eigenvectors(const Matrix& symmetric, Eigen::Index d) {
    return sym_eigen(symmetric).eigenvectors.leftCols(d);
}

ReducedDataset pca_reduce(const Matrix& v, Eigen::Index d) {
    check_target_dim(v, d, "pca_reduce");
    if (v.cols() < 2) throw ValidationError("pca_reduce: need at least two samples");
    return project_on_eigenbasis(v, second_moment(center(v).z), d, ReductionMethod::Pca);
}

ReducedDataset svd_reduce(const Matrix& v, Eigen::Index d) {
    check_target_dim(v, d, "svd_reduce");
    if (v.cols() < 1) throw ValidationError("svd_reduce: need at least one sample");
    return project_on_eigenbasis(v, second_moment(v), d, ReductionMethod::Svd);
}

ReducedDataset random_projection(const Matrix& v, Eigen::Index d, std::uint64_t seed) {
    check_target_dim(v, d, "random_projection");
    const Matrix r = orthonormalize_rows(gaussian_matrix(d, v.rows(), seed));
    if (r.rows() != d) throw UnsupportedError("random_projection: Gaussian draw was rank deficient");
    ReducedDataset out;
    out.method = ReductionMethod::RandomProjection;
    out.d = d;
    out.basis = r.transpose();
    out.v_tilde = r * v;
    return out;
}

ReducedDataset randomized_svd(const Matrix& v, Eigen::Index k, Eigen::Index sketch,
                              std::uint64_t seed) {
    if (k < 1) throw ValidationError("randomized_svd: K must be at least 1");
    if (sketch < k) throw ValidationError("randomized_svd: sketch size D must be >= K");
    if (sketch > std::min(v.rows(), v.cols())) {
        throw ValidationError("randomized_svd: sketch size D must be <= min(F, N)");
    }
    const Matrix a = gaussian_matrix(sketch, v.rows(), seed) * v;  // D x N
    const Matrix b = orthonormalize_rows(a);                        // rank(A) x N
    const Matrix m = v * b.transpose();                             // F x rank(A)
    if (m.cols() < k) throw UnsupportedError("randomized_svd: sketch rank is below K");

    // Left singular vectors of M from the small eigenproblem M^T M = W S^2 W^T.
    const SymmetricEigen eig = sym_eigen(m.transpose() * m);
    Matrix z(m.rows(), k);
    Vector sing(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        sing(i) = std::sqrt(std::max(eig.eigenvalues(i), 0.0));
        z.col(i) = m * eig.eigenvectors.col(i);
    }
    // Re-orthonormalise; columns with vanishing singular value are replaced by
    // whatever direction Gram-Schmidt leaves, which cannot happen for rank >= K.
    const Matrix zt = orthonormalize_rows(z.transpose());
    if (zt.rows() != k) throw UnsupportedError("randomized_svd: V has rank below K");

    ReducedDataset out;
    out.method = ReductionMethod::RandomizedSvd;
    out.d = k;
    out.basis = zt.transpose();
    out.spectrum = sing;
    out.v_tilde = zt * v;
    return out;
}

double gamma_factor(const Matrix& v, const Clustering& reduced, const Clustering& opt) {
    const double num = distortion(v, reduced);
    const double den = distortion(v, opt);
    if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

}  // namespace mixclust
