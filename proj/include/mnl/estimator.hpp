/// @file  estimator.hpp
/// @brief Nuclear-norm-regularized maximum likelihood: proximal gradient with
///        singular value thresholding, safeguarded Barzilai-Borwein steps,
///        identifiability projections, and the regularization schedules.

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <mnl/likelihood.hpp>
#include <mnl/preference.hpp>
#include <mnl/types.hpp>

namespace mnl {

enum class StepRule { Fixed, BarzilaiBorwein };

struct EstimatorConfig {
  double lambda = 0.0;
  Index maxIters = 5000;
  double tol = 1e-8;  ///< relative objective-change stopping threshold
  StepRule stepRule = StepRule::BarzilaiBorwein;
  double fixedStep = 0.0;  ///< base step when stepRule == Fixed; 0 picks 1/L

  /// Optional l-infinity projection applied after each prox step. Off by
  /// default; the regularizer keeps iterates bounded on its own.
  std::optional<double> alphaBox;

  Centering centering = Centering::PerRow;
  const GroupStructure* groups = nullptr;  ///< required for PerGroup

  /// Enforce centering by a quadratic penalty instead of the exact
  /// projection. Kept for fidelity comparisons; the returned matrix is then
  /// centered only approximately.
  bool centeringPenalty = false;
  double penaltyWeight = 1.0;

  /// Optional starting point; empty means the centered zero matrix.
  Matrix init;
};

struct FitResult {
  PreferenceMatrix thetaHat;
  std::vector<double> objectiveTrace;  ///< objective at init and after each accepted step
  std::vector<double> stepTrace;       ///< accepted step sizes
  Index iterations = 0;
  bool converged = false;
  double finalStep = 0.0;
  double fixedPointResidual = 0.0;  ///< ||x - prox(x - s g)|| / ||x|| at finalStep
};

/// Thrown when the solver cannot make progress and sits above its starting
/// objective; carries the objective trace for diagnosis.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& message, std::vector<double> trace)
      : std::runtime_error(message), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Regularization weight for pairwise graph sampling,
///   2 sqrt(32) max{ sqrt(sigma log(2d) / n), log(2d) / (n sqrt(gap)) }
/// with sigma = max{(d2 - G)/d1, 1} and d = (d1 + d2)/2. spectralBranchActive
/// records which side of the max won.
struct GraphLambda {
  double value = 0.0;
  double samplingBranch = 0.0;
  double spectralBranch = 0.0;
  bool spectralBranchActive = false;
};
GraphLambda graphLambdaDetail(std::size_t n, Index d1, Index d2, Index groupCount,
                              double spectralGap);
double graphLambda(std::size_t n, Index d1, Index d2, Index groupCount, double spectralGap);

/// Base rate e^{2 alpha} sqrt((d1 log d + d2 (log d)^2 (log 2d)^4) / (k d1^2 d2)).
double kwiseLambdaZero(double alpha, Index d1, Index d2, Index k);

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
};
/// The guaranteed interval [480 lambda0, c0 lambda0].
LambdaInterval kwiseLambdaTheory(double alpha, Index d1, Index d2, Index k, double c0 = 960.0);

/// The practical choice (1/2) sqrt(log(d) / (k d^2)), independent of alpha.
/// The formula targets one ranking per user; with `rounds` rankings per user
/// the gradient noise shrinks by sqrt(rounds) and the weight scales with it.
double kwisePracticalLambda(Index d, Index k, Index rounds = 1);

/// Base rate sqrt(d log d / (k d1^2 d2)) for the rank-broken estimator.
double rankBrokenLambdaZero(Index d1, Index d2, Index k);

/// sqrt(e^{2 alpha} max{d1, d2} log d / (n d1 d2)) for bundled choices.
double bundledLambda(double alpha, Index d1, Index d2, std::size_t n);

/// Minimize loss(theta) + lambda ||theta||_* over the centered class by
/// proximal gradient. Steps are accepted only if the composite objective does
/// not increase: a rejected Barzilai-Borwein step is halved up to 30 times and
/// then replaced by the conservative fixed step 1/L. After the objective
/// change drops below tol the solver polishes with the conservative step until
/// the prox fixed-point residual is small.
FitResult fit(const LossHandle& loss, const EstimatorConfig& cfg);

/// Minimize -L(theta) + lambda ||theta L^{1/2}||_* subject to theta g_i = 0,
/// by the change of variable phi = theta L^{1/2} restricted to the range of
/// L, where the regularizer is the plain nuclear norm and the constraint is
/// automatic. Pairwise losses only; alphaBox and penalty mode do not apply.
FitResult fitGraphWeighted(const LossHandle& loss, const MatrixRef& laplacian,
                           const GroupStructure& groups, EstimatorConfig cfg);

/// Break the rankings into pairs and fit the rank-broken likelihood with
/// per-row centering.
FitResult fitRankBroken(const std::vector<KWiseRanking>& rankings, Index d1, Index d2,
                        EstimatorConfig cfg);

/// CSV trace "iter,objective,step_size"; iteration 0 is the initial point.
void writeTraceCsv(std::ostream& out, const FitResult& result);

}  // namespace mnl
