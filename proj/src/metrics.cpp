#include <mnl/metrics.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <mnl/linalg.hpp>

namespace mnl {

ErrorReport makeErrorReport(const MatrixRef& estimate, const MatrixRef& truth,
                            const Matrix* lHalf, std::optional<double> predictionError) {
  ErrorReport report;
  report.rmse = rmse(estimate, truth);
  if (lHalf != nullptr) report.lRmse = laplacianRmse(estimate, truth, *lHalf);
  report.predictionError = predictionError;

  // sigmaTail[i] = sum of singular values past the (i+1)-th.
  const Vector sigma = svd(estimate).sigma;
  report.sigmaTail.resize(sigma.size());
  double tail = sigma.sum();
  for (Index r = 0; r < sigma.size(); ++r) {
    tail -= sigma(r);
    report.sigmaTail[r] = std::max(tail, 0.0);
  }
  return report;
}

void writeErrorReportCsv(std::ostream& out, const ErrorReport& report) {
  out << "rmse,l_rmse,prediction_error";
  for (std::size_t r = 0; r < report.sigmaTail.size(); ++r) out << ",tail_" << (r + 1);
  out << "\n";
  out.precision(17);
  out << report.rmse << ",";
  if (report.lRmse) out << *report.lRmse;
  out << ",";
  if (report.predictionError) out << *report.predictionError;
  for (double tail : report.sigmaTail) out << "," << tail;
  out << "\n";
}

double rmse(const MatrixRef& a, const MatrixRef& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("rmse: shape mismatch");
  }
  return (a - b).norm() / std::sqrt(static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

double laplacianRmse(const MatrixRef& a, const MatrixRef& b, const MatrixRef& lHalf) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("laplacianRmse: shape mismatch");
  }
  return laplacianFroNorm(a - b, lHalf) / std::sqrt(static_cast<double>(a.rows()));
}

Vector bordaScores(const std::vector<KWiseRanking>& rankings, Index d2) {
  if (rankings.empty()) throw std::invalid_argument("bordaScores: empty input");
  Vector positionSum = Vector::Zero(d2);
  Vector count = Vector::Zero(d2);
  Index k = 0;
  for (const auto& r : rankings) {
    k = static_cast<Index>(r.ranking.size());
    for (Index pos = 0; pos < k; ++pos) {
      const Index item = r.items[r.ranking[pos]];
      positionSum(item) += static_cast<double>(pos);
      count(item) += 1.0;
    }
  }
  const double neutral = static_cast<double>(k - 1) / 2.0;
  Vector scores(d2);
  for (Index j = 0; j < d2; ++j) {
    scores(j) = count(j) > 0.0 ? positionSum(j) / count(j) : neutral;
  }
  return scores;
}

namespace {

template <typename ScoreFn>
double misclassificationRate(const std::vector<PairwiseComparison>& heldout, ScoreFn&& score) {
  if (heldout.empty()) throw std::invalid_argument("predictionError: empty held-out set");
  std::size_t wrong = 0;
  for (const auto& c : heldout) {
    const double sa = score(c.user, c.itemA);
    const double sb = score(c.user, c.itemB);
    // Higher score wins; exact ties go to the smaller item index.
    bool predictAWins;
    if (sa == sb) {
      predictAWins = c.itemA < c.itemB;
    } else {
      predictAWins = sa > sb;
    }
    if (predictAWins != c.aWins) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(heldout.size());
}

}  // namespace

double predictionError(const MatrixRef& rowScores, const std::vector<PairwiseComparison>& heldout) {
  return misclassificationRate(heldout,
                               [&](Index user, Index item) { return rowScores(user, item); });
}

double pooledPredictionError(const VectorRef& itemScores,
                             const std::vector<PairwiseComparison>& heldout) {
  return misclassificationRate(heldout, [&](Index, Index item) { return itemScores(item); });
}

double sigmaTail(const MatrixRef& theta, Index r) {
  if (r < 0 || r > std::min(theta.rows(), theta.cols())) {
    throw std::invalid_argument("sigmaTail: r out of range");
  }
  const Vector sigma = svd(theta).sigma;
  double tail = 0.0;
  for (Index j = r; j < sigma.size(); ++j) tail += sigma(j);
  return tail;
}

double lqRadius(const MatrixRef& theta, double q) {
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("lqRadius: q must be in (0, 1]");
  const Vector sigma = svd(theta).sigma;
  double sum = 0.0;
  for (Index j = 0; j < sigma.size(); ++j) sum += std::pow(sigma(j), q);
  return sum;
}

double psi(double x) {
  const double e = std::exp(-std::abs(x));
  // e^x / (1 + e^x)^2 is symmetric; evaluate with the decaying exponential.
  return e / ((1.0 + e) * (1.0 + e));
}

double graphBoundRhs(double alpha, double lambda, Index r, double errL, double tail) {
  if (r < 0) throw std::invalid_argument("graphBoundRhs: r must be nonnegative");
  return 36.0 * lambda * (alpha + 1.0 / psi(2.0 * alpha)) *
         (std::sqrt(2.0 * static_cast<double>(r)) * errL + tail);
}

}  // namespace mnl
