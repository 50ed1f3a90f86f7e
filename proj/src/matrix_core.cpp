#include "mixclust/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mixclust/errors.hpp"

namespace mixclust {

namespace {

constexpr int kMaxSweeps = 100;

void check_symmetric(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw ValidationError("sym_eigen: matrix is not square");
    }
    const double norm = a.norm();
    const double asym = (a - a.transpose()).norm();
    if (asym > 1e-9 * norm) {
        throw ValidationError("sym_eigen: matrix is not symmetric");
    }
}

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

// Runs cyclic Jacobi sweeps in place. On return the diagonal of `a` holds the
// (unsorted) eigenvalues and, when `v` is non-null, its columns the eigenvectors.
std::pair<int, bool> jacobi_sweeps(Matrix& a, Matrix* v, double tol) {
    const Eigen::Index m = a.rows();
    const double threshold = tol * a.norm();
    int sweep = 0;
    bool converged = off_diagonal_norm(a) <= threshold;
    while (!converged && sweep < kMaxSweeps) {
        ++sweep;
        for (Eigen::Index p = 0; p + 1 < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // A <- J^T A J, columns first then rows.
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (v != nullptr) {
                    for (Eigen::Index k = 0; k < m; ++k) {
                        const double vkp = (*v)(k, p);
                        const double vkq = (*v)(k, q);
                        (*v)(k, p) = c * vkp - s * vkq;
                        (*v)(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
        converged = off_diagonal_norm(a) <= threshold;
    }
    return {sweep, converged};
}

std::vector<Eigen::Index> descending_order(const Vector& values) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return values(x) > values(y); });
    return order;
}

}  // namespace

SymmetricEigen sym_eigen(const Matrix& a, double tol) {
    check_symmetric(a);
    const Eigen::Index m = a.rows();
    Matrix work = 0.5 * (a + a.transpose());
    Matrix vecs = Matrix::Identity(m, m);
    const auto [sweeps, converged] = jacobi_sweeps(work, &vecs, tol);

    const Vector diag = work.diagonal();
    const auto order = descending_order(diag);

    SymmetricEigen out;
    out.eigenvalues.resize(m);
    out.eigenvectors.resize(m, m);
    out.sweeps = sweeps;
    out.converged = converged;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        out.eigenvalues(i) = diag(src);
        auto col = out.eigenvectors.col(i);
        col = vecs.col(src);
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col(arg) < 0.0) col = -col;
    }
    return out;
}

Vector sym_eigenvalues(const Matrix& a, double tol) {
    check_symmetric(a);
    Matrix work = 0.5 * (a + a.transpose());
    jacobi_sweeps(work, nullptr, tol);
    Vector diag = work.diagonal();
    std::sort(diag.data(), diag.data() + diag.size(), std::greater<>());
    return diag;
}

CenteredData center(const Matrix& v) {
    if (v.cols() < 1) {
        throw ValidationError("center: need at least one column");
    }
    CenteredData out;
    out.mean = v.rowwise().mean();
    out.z = v.colwise() - out.mean;
    return out;
}

ScatterSpectrum scatter_spectrum(const Matrix& z) {
    if (z.cols() <= z.rows()) {
        throw UnsupportedError("scatter_spectrum: requires N > F");
    }
    ScatterSpectrum out;
    Matrix gram = Matrix::Zero(z.rows(), z.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z);
    gram = gram.selfadjointView<Eigen::Lower>();
    out.eigenvalues = sym_eigenvalues(gram);
    out.trace = z.squaredNorm();
    return out;
}

ScatterSpectrum gram_spectrum(const Matrix& z) {
    if (z.cols() > z.rows()) {
        return scatter_spectrum(z);
    }
    ScatterSpectrum out;
    const Matrix gram = z.transpose() * z;
    out.eigenvalues = sym_eigenvalues(gram);
    out.trace = z.squaredNorm();
    return out;
}

double eigenvalue_or_zero(const Vector& spectrum, Eigen::Index i) {
    return i < spectrum.size() ? spectrum(i) : 0.0;
}

double orthonormality_defect(const Matrix& b) {
    return (b.transpose() * b - Matrix::Identity(b.cols(), b.cols())).norm();
}

double projector_distance(const Matrix& b1, const Matrix& b2) {
    if (b1.rows() != b2.rows()) {
        throw ValidationError("projector_distance: bases live in different spaces");
    }
    if (orthonormality_defect(b1) > 1e-9 || orthonormality_defect(b2) > 1e-9) {
        throw ValidationError("projector_distance: basis is not orthonormal");
    }
    const Matrix p1 = b1 * b1.transpose();
    const Matrix p2 = b2 * b2.transpose();
    return (p1 - p2).norm();
}

double spectral_norm_symmetric(const Matrix& a) {
    const Vector ev = sym_eigenvalues(a);
    if (ev.size() == 0) return 0.0;
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace mixclust
