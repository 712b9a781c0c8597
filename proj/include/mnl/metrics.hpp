/// @file  metrics.hpp
/// @brief Error metrics, the Borda-count baseline, singular value tail
///        diagnostics, and the graph-sampling error-bound expression.

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <mnl/observations.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// Bundle of error metrics for one estimate: Frobenius RMSE against the
/// truth, optionally the Laplacian RMSE and a held-out prediction error, and
/// the estimate's singular-value tail sums (sigmaTail[r] sums the values
/// past the r-th) as an effective-rank diagnostic.
struct ErrorReport {
  double rmse = 0.0;
  std::optional<double> lRmse;
  std::optional<double> predictionError;
  std::vector<double> sigmaTail;
};

ErrorReport makeErrorReport(const MatrixRef& estimate, const MatrixRef& truth,
                            const Matrix* lHalf = nullptr,
                            std::optional<double> predictionError = std::nullopt);

/// One header line and one data row: "rmse,l_rmse,prediction_error,tail_0,...";
/// absent optionals are empty cells.
void writeErrorReportCsv(std::ostream& out, const ErrorReport& report);

/// ||a - b||_F / sqrt(d1 d2).
double rmse(const MatrixRef& a, const MatrixRef& b);

/// ||(a - b) lHalf||_F / sqrt(d1).
double laplacianRmse(const MatrixRef& a, const MatrixRef& b, const MatrixRef& lHalf);

/// Borda scores: average rank position of each item over the rankings that
/// contain it (0 = best). Items never ranked get the neutral score (k-1)/2.
Vector bordaScores(const std::vector<KWiseRanking>& rankings, Index d2);

/// Fraction of held-out comparisons mispredicted by per-user row scores,
/// higher score wins; ties go to the smaller item index.
double predictionError(const MatrixRef& rowScores, const std::vector<PairwiseComparison>& heldout);

/// Same with a single population-level score vector (e.g. negated Borda
/// scores) applied to every user.
double pooledPredictionError(const VectorRef& itemScores,
                             const std::vector<PairwiseComparison>& heldout);

/// Tail sum of singular values past the r-th one.
double sigmaTail(const MatrixRef& theta, Index r);

/// sum_j sigma_j^q, the lq-ball radius of theta; 0 < q <= 1.
double lqRadius(const MatrixRef& theta, double q);

/// psi(x) = e^x / (1 + e^x)^2, the logistic curvature.
double psi(double x);

/// Right-hand side of the graph-sampling error bound:
///   36 lambda (alpha + 1/psi(2 alpha)) (sqrt(2 r) errL + tail).
double graphBoundRhs(double alpha, double lambda, Index r, double errL, double tail);

}  // namespace mnl
