/// @file  linalg.hpp
/// @brief Dense matrix primitives: SVD, nuclear norm, singular value
///        soft-thresholding, Laplacian pseudo-powers and induced norms.

#pragma once

#include <stdexcept>

#include <mnl/types.hpp>

namespace mnl {

/// Thrown when a dense decomposition fails to converge or an input violates
/// a numerical precondition (e.g. a supposedly PSD matrix has a clearly
/// negative eigenvalue).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thin SVD factors: m = u * sigma.asDiagonal() * v.transpose(),
/// with sigma sorted nonincreasing and u, v having orthonormal columns.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Thin SVD. Throws NumericalError on non-finite input or non-convergence.
SvdFactors svd(const MatrixRef& m);

/// Sum of singular values.
double nuclearNorm(const MatrixRef& m);

/// Singular value soft-thresholding: u * max(sigma - tau, 0) * v^T.
/// This is the proximal operator of tau * ||.||_*.
Matrix svt(const MatrixRef& m, double tau);

/// Pseudo-power of a symmetric PSD matrix with a known null space dimension:
/// eigenvectors of the nullDim smallest eigenvalues are dropped and the power
/// acts on the remaining spectrum. Eigenvalues of magnitude at most
/// 1e-10 * max eigenvalue count as null; a negative eigenvalue beyond that
/// tolerance raises NumericalError.
Matrix laplacianPower(const MatrixRef& l, double x, Index nullDim);

/// Frobenius norm of theta * lHalf, where lHalf is a matrix square root of a
/// graph Laplacian.
double laplacianFroNorm(const MatrixRef& theta, const MatrixRef& lHalf);

/// Nuclear norm of theta * lHalf.
double laplacianNuclearNorm(const MatrixRef& theta, const MatrixRef& lHalf);

}  // namespace mnl
