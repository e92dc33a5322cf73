#pragma once

#include <Eigen/Dense>
#include <complex>

// Dense complex Hermitian primitives shared by the whole library:
// PSD tests, eigendecompositions with a fixed ordering/phase convention,
// null-space extraction and numeric rank. Everything here is a pure
// function over value types and safe to call concurrently.

namespace swiptsec {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Eigendecomposition of a Hermitian matrix.
// Eigenvalues sorted descending; eigenvectors orthonormal columns in the
// matching order. Phase convention: the first component of each column
// whose magnitude exceeds 1e-12 * max|entry| is made real and positive,
// so the decomposition is deterministic for a fixed input.
struct EigenResult {
    RVec eigenvalues;
    CMat eigenvectors;
};

// (X + X^H) / 2. Absorbs solver round-off before eigensolves.
CMat hermitize(const CMat& x);

// max_ij |X_ij - conj(X_ji)| <= tol
bool is_hermitian(const CMat& x, double tol = 1e-12);

// Frobenius norm.
double fro_norm(const CMat& x);

// Throws std::invalid_argument when the input is not square/Hermitian.
EigenResult eig_hermitian(const CMat& x);

// Largest eigenvalue. Throws on non-Hermitian input.
double lambda_max(const CMat& x);

// min eigenvalue >= -tol * max(1, ||X||_2)
bool is_psd(const CMat& x, double tol = 1e-9);

// Orthonormal columns spanning the eigenspaces with eigenvalue
// <= threshold * lambda_max(X). Empty (n x 0) matrix when X is full rank.
// Intended for PSD inputs (threshold is relative to the top eigenvalue).
CMat null_basis(const CMat& x, double threshold = 1e-8);

// Count of eigenvalues > rel_tol * lambda_max(X); 0 for the zero matrix.
int numeric_rank(const CMat& x, double rel_tol = 1e-6);

}  // namespace swiptsec
