/// @file  likelihood.hpp
/// @brief Negative log-likelihood values and analytic gradients for all data
///        types, and the LossHandle the estimator consumes.

#pragma once

#include <variant>
#include <vector>

#include <mnl/observations.hpp>
#include <mnl/rank_breaking.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// Mean negative log-likelihood over n comparisons:
///   (1/n) sum log(1 + exp(z_i)) - y_i z_i,   z_i = theta(u, a) - theta(u, b).
double pairwiseNll(const MatrixRef& theta, const std::vector<PairwiseComparison>& data);

/// Gradient of pairwiseNll: -(1/n) sum (y_i - sigmoid(z_i)) X_i.
Matrix pairwiseGrad(const MatrixRef& theta, const std::vector<PairwiseComparison>& data);

/// Negative log-likelihood of N rankings with the 1/(k N) scaling:
///   -(1/(k N)) sum_i sum_l [ theta(i, v_{i,l}) - logsumexp(remaining) ].
double kwiseNll(const MatrixRef& theta, const std::vector<KWiseRanking>& data);

/// Gradient of kwiseNll; rows of the result sum to zero.
Matrix kwiseGrad(const MatrixRef& theta, const std::vector<KWiseRanking>& data);

/// Negative log-likelihood over all broken pairs with the 1/(N k-choose-2)
/// scaling. Pairs of a duplicated item contribute a constant log 2.
double rankBrokenNll(const MatrixRef& theta, const BrokenPairSet& broken);
Matrix rankBrokenGrad(const MatrixRef& theta, const BrokenPairSet& broken);

/// Single-choice negative log-likelihood, (1/n) normalized; the k1 = 1
/// specialization of the bundled model with the user indexing rows.
double choiceNll(const MatrixRef& theta, const std::vector<ChoiceObservation>& data);
Matrix choiceGrad(const MatrixRef& theta, const std::vector<ChoiceObservation>& data);

/// Bundled-choice negative log-likelihood over the offered k1 x k2 grids,
/// (1/n) normalized. The gradient has zero total sum.
double bundledNll(const MatrixRef& theta, const std::vector<BundledChoice>& data);
Matrix bundledGrad(const MatrixRef& theta, const std::vector<BundledChoice>& data);

enum class LossKind { Pairwise, Kwise, RankBroken, Choice, Bundled };

/// A data-bound objective: value() is the negative log-likelihood and
/// gradient() its exact derivative. Evaluation is read-only and sequential,
/// so results are deterministic; handles may be shared across threads.
class LossHandle {
 public:
  static LossHandle pairwise(ObservationSet obs);
  static LossHandle kwise(ObservationSet obs);
  static LossHandle choice(ObservationSet obs);
  static LossHandle bundled(ObservationSet obs);
  static LossHandle rankBroken(BrokenPairSet broken, Index d1, Index d2);

  double value(const MatrixRef& theta) const;
  Matrix gradient(const MatrixRef& theta) const;

  LossKind kind() const { return kind_; }
  Index d1() const { return d1_; }
  Index d2() const { return d2_; }

  /// Safe upper bound on the Lipschitz constant of the gradient; used by the
  /// solver for its initial and fallback step sizes.
  double lipschitzBound() const;

 private:
  LossHandle(LossKind kind, Index d1, Index d2) : kind_(kind), d1_(d1), d2_(d2) {}

  LossKind kind_;
  Index d1_;
  Index d2_;
  std::variant<ObservationSet, BrokenPairSet> data_;
};

}  // namespace mnl
