#include <mnl/linalg.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mnl {

namespace {

constexpr double kNullSpaceTol = 1e-10;

void requireFinite(const MatrixRef& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": input has NaN or Inf entries");
  }
}

}  // namespace

SvdFactors svd(const MatrixRef& m) {
  requireFinite(m, "svd");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericalError("svd: decomposition did not converge");
  }
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double nuclearNorm(const MatrixRef& m) {
  requireFinite(m, "nuclearNorm");
  Eigen::BDCSVD<Matrix> dec(m);
  if (dec.info() != Eigen::Success) {
    throw NumericalError("nuclearNorm: decomposition did not converge");
  }
  return dec.singularValues().sum();
}

Matrix svt(const MatrixRef& m, double tau) {
  if (tau < 0) {
    throw std::invalid_argument("svt: tau must be nonnegative");
  }
  SvdFactors f = svd(m);
  Vector shrunk = (f.sigma.array() - tau).max(0.0);
  return f.u * shrunk.asDiagonal() * f.v.transpose();
}

Matrix laplacianPower(const MatrixRef& l, double x, Index nullDim) {
  requireFinite(l, "laplacianPower");
  if (l.rows() != l.cols()) {
    throw std::invalid_argument("laplacianPower: matrix must be square");
  }
  if (nullDim < 0 || nullDim > l.rows()) {
    throw std::invalid_argument("laplacianPower: nullDim out of range");
  }
  if ((l - l.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, l.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("laplacianPower: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(l);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("laplacianPower: eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();  // ascending
  const Index n = l.rows();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1.0);
  const double tol = kNullSpaceTol * scale;

  if (values(0) < -tol) {
    throw NumericalError("laplacianPower: matrix is not PSD");
  }
  for (Index i = 0; i < nullDim; ++i) {
    if (std::abs(values(i)) > tol) {
      throw NumericalError("laplacianPower: declared null space eigenvalue is not zero");
    }
  }

  Matrix result = Matrix::Zero(n, n);
  for (Index i = nullDim; i < n; ++i) {
    const double lam = std::max(values(i), 0.0);
    if (lam <= tol) continue;  // roundoff null beyond the declared ones
    result.noalias() +=
        std::pow(lam, x) * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).transpose();
  }
  return result;
}

double laplacianFroNorm(const MatrixRef& theta, const MatrixRef& lHalf) {
  if (theta.cols() != lHalf.rows()) {
    throw std::invalid_argument("laplacianFroNorm: shape mismatch");
  }
  return (theta * lHalf).norm();
}

double laplacianNuclearNorm(const MatrixRef& theta, const MatrixRef& lHalf) {
  if (theta.cols() != lHalf.rows()) {
    throw std::invalid_argument("laplacianNuclearNorm: shape mismatch");
  }
  return nuclearNorm(theta * lHalf);
}

}  // namespace mnl
