#pragma once

#include <Eigen/Dense>

namespace mixclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted non-increasing; column i of `eigenvectors` pairs with
/// eigenvalue i. Each eigenvector is sign-normalized so that its entry of
/// largest magnitude is positive. Within a repeated eigenvalue the basis is
/// arbitrary; compare subspaces with projector_distance, never column by column.
struct SymmetricEigen {
    Vector eigenvalues;
    Matrix eigenvectors;
    int sweeps = 0;
    bool converged = false;
};

/// Data with the column mean removed. Columns of `z` are samples.
struct CenteredData {
    Matrix z;
    Vector mean;
};

struct ScatterSpectrum {
    Vector eigenvalues;  ///< top min(F, N) eigenvalues of S = Z^T Z, non-increasing
    double trace = 0.0;  ///< tr(S) = ||Z||_F^2
};

/// Cyclic Jacobi eigensolver. Sweeps stop once the off-diagonal Frobenius norm
/// drops below `tol * ||A||_F` or after 100 sweeps.
///
/// Throws ValidationError when ||A - A^T||_F > 1e-9 ||A||_F or A is not square.
SymmetricEigen sym_eigen(const Matrix& a, double tol = 1e-12);

/// Eigenvalues only (same algorithm, skips accumulating rotations).
Vector sym_eigenvalues(const Matrix& a, double tol = 1e-12);

/// Subtracts the column mean from every column. Requires at least one column.
CenteredData center(const Matrix& v);

/// Spectrum of S = Z^T Z computed through the F x F matrix Z Z^T; the nonzero
/// spectra of the two agree. Requires N > F (throws UnsupportedError otherwise).
ScatterSpectrum scatter_spectrum(const Matrix& z);

/// Nonzero-capable spectrum of Z^T Z for any shape: solves whichever of
/// Z Z^T / Z^T Z is smaller. Length min(F, N).
ScatterSpectrum gram_spectrum(const Matrix& z);

/// i-th largest eigenvalue (0-based) of a spectrum, treating missing trailing
/// entries as the zero eigenvalues of the larger Gram matrix.
double eigenvalue_or_zero(const Vector& spectrum, Eigen::Index i);

/// ||B1 B1^T - B2 B2^T||_F for bases with orthonormal columns.
/// Throws ValidationError when a basis deviates from orthonormal by more than 1e-9.
double projector_distance(const Matrix& b1, const Matrix& b2);

/// max |lambda_i(A)| for symmetric A.
double spectral_norm_symmetric(const Matrix& a);

/// ||B^T B - I||_F.
double orthonormality_defect(const Matrix& b);

}  // namespace mixclust
