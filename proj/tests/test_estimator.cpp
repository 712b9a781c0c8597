#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <mnl/estimator.hpp>
#include <mnl/linalg.hpp>
#include <mnl/metrics.hpp>
#include <mnl/sampler.hpp>

#include "test_util.hpp"

using mnl::Centering;
using mnl::EstimatorConfig;
using mnl::Index;
using mnl::Matrix;

namespace {

void checkMonotoneTrace(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1] + 1e-12 * std::max(1.0, std::abs(trace[i - 1])));
  }
}

}  // namespace

TEST_CASE("graph lambda formula against an independent evaluation") {
  // n = 1024, d1 = d2 = 16, G = 1, complete graph: gap = 1/15.
  const auto detail = mnl::graphLambdaDetail(1024, 16, 16, 1, 1.0 / 15.0);
  const double d = 16.0;
  const double sigma = std::max(15.0 / 16.0, 1.0);
  const double branch1 = std::sqrt(sigma * std::log(2.0 * d) / 1024.0);
  const double branch2 = std::sqrt(15.0) * std::log(2.0 * d) / 1024.0;
  const double expected = 2.0 * std::sqrt(32.0) * std::max(branch1, branch2);
  CHECK(detail.value == doctest::Approx(expected).epsilon(1e-14));
  CHECK_FALSE(detail.spectralBranchActive);

  // sqrt(1/n) scaling when the sampling branch dominates.
  CHECK(mnl::graphLambda(4096, 16, 16, 1, 1.0 / 15.0) ==
        doctest::Approx(0.5 * mnl::graphLambda(1024, 16, 16, 1, 1.0 / 15.0)).epsilon(1e-12));

  // Monotone nonincreasing in n.
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {64, 256, 1024, 4096, 16384}) {
    const double value = mnl::graphLambda(n, 16, 16, 1, 1.0 / 15.0);
    CHECK(value <= previous);
    previous = value;
  }

  // A tiny spectral gap activates the second branch.
  CHECK(mnl::graphLambdaDetail(100, 16, 16, 1, 1e-8).spectralBranchActive);
}

TEST_CASE("kwise lambda schedules") {
  const double alpha = 1.5;
  const Index d1 = 40, d2 = 60, k = 8;
  const double d = 50.0;
  const double logd = std::log(d);
  const double log2d = std::log(2.0 * d);
  const double expected = std::exp(2.0 * alpha) *
                          std::sqrt((d1 * logd + d2 * logd * logd * std::pow(log2d, 4)) /
                                    (static_cast<double>(k) * d1 * d1 * d2));
  CHECK(mnl::kwiseLambdaZero(alpha, d1, d2, k) == doctest::Approx(expected).epsilon(1e-14));

  const auto interval = mnl::kwiseLambdaTheory(alpha, d1, d2, k);
  CHECK(interval.lo == doctest::Approx(480.0 * expected).epsilon(1e-12));
  CHECK(interval.hi > interval.lo);

  const double practical = mnl::kwisePracticalLambda(50, 8);
  CHECK(practical == doctest::Approx(0.5 * std::sqrt(std::log(50.0) / (8.0 * 2500.0)))
                         .epsilon(1e-14));
  CHECK(practical > 0.0);
  CHECK(practical < 1.0);

  // Both schedules scale as 1/sqrt(k).
  CHECK(mnl::kwisePracticalLambda(50, 32) ==
        doctest::Approx(0.5 * mnl::kwisePracticalLambda(50, 8)).epsilon(1e-12));
  CHECK(mnl::kwiseLambdaZero(alpha, d1, d2, 32) ==
        doctest::Approx(0.5 * mnl::kwiseLambdaZero(alpha, d1, d2, 8)).epsilon(1e-12));
}

TEST_CASE("rank-broken and bundled lambda schedules") {
  const Index d1 = 30, d2 = 30, k = 8;
  const double d = 30.0;
  CHECK(mnl::rankBrokenLambdaZero(d1, d2, k) ==
        doctest::Approx(std::sqrt(d * std::log(d) / (8.0 * 900.0 * 30.0))).epsilon(1e-14));

  const double alpha = 2.0;
  const std::size_t n = 30000;
  CHECK(mnl::bundledLambda(alpha, d1, d2, n) ==
        doctest::Approx(std::sqrt(std::exp(4.0) * 30.0 * std::log(30.0) / (30000.0 * 900.0)))
            .epsilon(1e-14));

  // 1/sqrt(n) scaling and symmetry in the dimensions.
  CHECK(mnl::bundledLambda(alpha, d1, d2, 4 * n) ==
        doctest::Approx(0.5 * mnl::bundledLambda(alpha, d1, d2, n)).epsilon(1e-12));
  CHECK(mnl::bundledLambda(alpha, 20, 45, n) ==
        doctest::Approx(mnl::bundledLambda(alpha, 45, 20, n)).epsilon(1e-12));
}

TEST_CASE("an overwhelming lambda drives the estimate to zero") {
  const auto truth = mnl::randomLowRank(8, 8, 2, 2.0, Centering::PerRow, 1);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 2, 10);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(8, 8, rankings));

  EstimatorConfig cfg;
  cfg.lambda = 10.0 * loss.gradient(Matrix::Zero(8, 8)).norm();  // beyond any singular value
  const auto result = mnl::fit(loss, cfg);
  CHECK(result.thetaHat.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(result.converged);
}

TEST_CASE("noiseless-limit sanity: plenty of rankings beat the zero estimate") {
  const Index d = 12, k = 6;
  const auto truth = mnl::randomLowRank(d, d, 2, 2.0, Centering::PerRow, 7);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, k, 8, 200);

  EstimatorConfig cfg;
  cfg.lambda = mnl::kwisePracticalLambda(d, k, 200);
  const auto result =
      mnl::fit(mnl::LossHandle::kwise(mnl::ObservationSet::kwise(d, d, rankings)), cfg);

  const Matrix zero = Matrix::Zero(d, d);
  CHECK(mnl::rmse(result.thetaHat.theta, truth.theta) < mnl::rmse(zero, truth.theta));
  checkMonotoneTrace(result.objectiveTrace);
  CHECK(result.fixedPointResidual <= 10.0 * cfg.tol);
}

TEST_CASE("the minimizer beats the feasible ground truth") {
  const Index d = 30;
  const auto truth = mnl::randomLowRank(d, d, 2, 2.0, Centering::PerRow, 3);
  const auto data = mnl::samplePairwise(truth.theta, mnl::completeGraph(d), 20000, 4);
  auto loss = mnl::LossHandle::pairwise(mnl::ObservationSet::pairwise(d, d, data));

  EstimatorConfig cfg;
  cfg.lambda = mnl::graphLambda(20000, d, d, 1, 1.0 / (d - 1)) / 64.0;
  const auto result = mnl::fit(loss, cfg);

  const double objectiveAtTruth = loss.value(truth.theta) + cfg.lambda * mnl::nuclearNorm(truth.theta);
  const double objectiveAtFit = result.objectiveTrace.back();
  CHECK(objectiveAtFit <= objectiveAtTruth);

  // Feasibility and the prox fixed point.
  CHECK(result.thetaHat.theta.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(result.fixedPointResidual <= 10.0 * cfg.tol);
  checkMonotoneTrace(result.objectiveTrace);
}

TEST_CASE("reported objective matches a recomputation at theta-hat") {
  const auto truth = mnl::randomLowRank(10, 10, 2, 2.0, Centering::PerRow, 5);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 6, 30);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(10, 10, rankings));

  EstimatorConfig cfg;
  cfg.lambda = mnl::kwisePracticalLambda(10, 4);
  const auto result = mnl::fit(loss, cfg);
  const double recomputed =
      loss.value(result.thetaHat.theta) + cfg.lambda * mnl::nuclearNorm(result.thetaHat.theta);
  CHECK(std::abs(recomputed - result.objectiveTrace.back()) <=
        cfg.tol * std::max(1.0, std::abs(recomputed)));
}

TEST_CASE("solver output does not depend on the initial point") {
  const auto truth = mnl::randomLowRank(10, 10, 2, 2.0, Centering::PerRow, 9);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 10, 40);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(10, 10, rankings));

  EstimatorConfig cfg;
  cfg.lambda = mnl::kwisePracticalLambda(10, 4);
  cfg.tol = 1e-10;
  const auto fromZero = mnl::fit(loss, cfg);

  cfg.init = 0.02 * testutil::randomMatrix(10, 10, 11);
  const auto fromRandom = mnl::fit(loss, cfg);
  CHECK(std::abs(fromZero.objectiveTrace.back() - fromRandom.objectiveTrace.back()) <= 1e-8);
}

TEST_CASE("alpha box projection is exact") {
  const auto truth = mnl::randomLowRank(8, 8, 2, 3.0, Centering::PerRow, 13);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 14, 50);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(8, 8, rankings));

  EstimatorConfig cfg;
  cfg.lambda = 0.2 * mnl::kwisePracticalLambda(8, 4);  // light touch, box binds
  cfg.alphaBox = 0.05;
  const auto result = mnl::fit(loss, cfg);
  CHECK(result.thetaHat.theta.cwiseAbs().maxCoeff() <= 0.05 + 1e-15);
  CHECK(result.thetaHat.alpha == doctest::Approx(0.05));
}

TEST_CASE("fixed step rule also solves the problem") {
  const auto truth = mnl::randomLowRank(8, 8, 2, 2.0, Centering::PerRow, 15);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 16, 60);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(8, 8, rankings));

  EstimatorConfig bb;
  bb.lambda = mnl::kwisePracticalLambda(8, 4);
  EstimatorConfig fixed = bb;
  fixed.stepRule = mnl::StepRule::Fixed;

  const auto a = mnl::fit(loss, bb);
  const auto b = mnl::fit(loss, fixed);
  CHECK(std::abs(a.objectiveTrace.back() - b.objectiveTrace.back()) <= 1e-7);
  CHECK(b.iterations >= a.iterations);  // BB accelerates
}

TEST_CASE("penalty mode approximates the projected solution") {
  const auto truth = mnl::randomLowRank(8, 8, 2, 2.0, Centering::PerRow, 17);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 4, 18, 60);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(8, 8, rankings));

  EstimatorConfig cfg;
  cfg.lambda = mnl::kwisePracticalLambda(8, 4);
  cfg.centeringPenalty = true;
  cfg.penaltyWeight = 10.0;
  const auto result = mnl::fit(loss, cfg);
  // The kwise likelihood is row-shift invariant, so the penalty pins the row
  // sums near zero without changing the fit quality.
  CHECK(result.thetaHat.theta.rowwise().sum().cwiseAbs().maxCoeff() < 1e-2);

  EstimatorConfig exact;
  exact.lambda = cfg.lambda;
  const auto projected = mnl::fit(loss, exact);
  CHECK(mnl::rmse(result.thetaHat.theta, projected.thetaHat.theta) < 0.05);
}

TEST_CASE("graph-weighted fit matches the plain fit on a complete graph") {
  // On a complete graph L^{1/2} is a multiple of the centering projector, so
  // the weighted problem with lambda equals the plain problem with
  // lambda / sqrt(d2 - 1).
  const Index d = 16;
  const auto graph = mnl::completeGraph(d);
  const Matrix lap = mnl::laplacian(graph);
  const auto gs = mnl::groups(graph);
  const Matrix lHalf = mnl::laplacianPower(lap, 0.5, 1);

  const auto truth = mnl::randomLowRank(d, d, 2, 2.0, Centering::PerRow, 19);
  const auto data = mnl::samplePairwise(truth.theta, graph, 6000, 20);
  auto loss = mnl::LossHandle::pairwise(mnl::ObservationSet::pairwise(d, d, data));

  EstimatorConfig weighted;
  weighted.lambda = mnl::graphLambda(6000, d, d, 1, 1.0 / (d - 1)) / 64.0;
  const auto viaPhi = mnl::fitGraphWeighted(loss, lap, gs, weighted);

  EstimatorConfig plain;
  plain.lambda = weighted.lambda / std::sqrt(static_cast<double>(d - 1));
  const auto direct = mnl::fit(loss, plain);

  const double errWeighted = mnl::laplacianRmse(truth.theta, viaPhi.thetaHat.theta, lHalf);
  const double errPlain = mnl::laplacianRmse(truth.theta, direct.thetaHat.theta, lHalf);
  CHECK(std::abs(errWeighted - errPlain) / errPlain < 0.05);

  // Centering held exactly.
  CHECK(viaPhi.thetaHat.theta.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
  checkMonotoneTrace(viaPhi.objectiveTrace);
  CHECK(viaPhi.fixedPointResidual <= 10.0 * weighted.tol);
}

TEST_CASE("an overwhelming lambda zeroes the graph-weighted fit too") {
  const Index d = 10;
  const auto graph = mnl::lineGraph(d);
  const Matrix lap = mnl::laplacian(graph);
  const auto gs = mnl::groups(graph);
  const auto truth = mnl::randomLowRank(d, d, 2, 1.0, Centering::PerRow, 21);
  const auto data = mnl::samplePairwise(truth.theta, graph, 500, 22);
  auto loss = mnl::LossHandle::pairwise(mnl::ObservationSet::pairwise(d, d, data));

  EstimatorConfig cfg;
  cfg.lambda = 1e3;
  const auto result = mnl::fitGraphWeighted(loss, lap, gs, cfg);
  CHECK(result.thetaHat.theta.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("disconnected components keep their block means at zero") {
  // Two complete components of 4 items each.
  Matrix p = Matrix::Zero(8, 8);
  for (Index base : {0, 4})
    for (Index a = base; a < base + 4; ++a)
      for (Index b = a + 1; b < base + 4; ++b) p(a, b) = p(b, a) = 1.0;
  p /= p.sum();
  const mnl::SamplingGraph graph(8, p);
  const Matrix lap = mnl::laplacian(graph);
  const auto gs = mnl::groups(graph);
  REQUIRE(gs.count() == 2);

  const auto truth = mnl::randomLowRank(6, 8, 2, 2.0, Centering::PerGroup, 23, &gs);
  const auto data = mnl::samplePairwise(truth.theta, graph, 4000, 24);
  auto loss = mnl::LossHandle::pairwise(mnl::ObservationSet::pairwise(6, 8, data));

  EstimatorConfig cfg;
  cfg.lambda = mnl::graphLambda(4000, 6, 8, 2, mnl::spectralGap(lap, 2)) / 64.0;
  const auto result = mnl::fitGraphWeighted(loss, lap, gs, cfg);
  for (const auto& g : gs.indicators) {
    CHECK((result.thetaHat.theta * g).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("graph-weighted fit rejects unsupported configurations") {
  const Index d = 8;
  const auto graph = mnl::completeGraph(d);
  const Matrix lap = mnl::laplacian(graph);
  const auto gs = mnl::groups(graph);
  const auto truth = mnl::randomLowRank(d, d, 2, 1.0, Centering::PerRow, 31);

  EstimatorConfig cfg;
  cfg.lambda = 0.01;

  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 3, 32, 5);
  auto kwiseLoss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(d, d, rankings));
  CHECK_THROWS_AS(mnl::fitGraphWeighted(kwiseLoss, lap, gs, cfg), std::invalid_argument);

  const auto data = mnl::samplePairwise(truth.theta, graph, 200, 33);
  auto loss = mnl::LossHandle::pairwise(mnl::ObservationSet::pairwise(d, d, data));
  cfg.alphaBox = 1.0;
  CHECK_THROWS_AS(mnl::fitGraphWeighted(loss, lap, gs, cfg), std::invalid_argument);
  cfg.alphaBox.reset();
  cfg.centeringPenalty = true;
  CHECK_THROWS_AS(mnl::fitGraphWeighted(loss, lap, gs, cfg), std::invalid_argument);
  cfg.centeringPenalty = false;

  const Matrix wrongLap = mnl::laplacian(mnl::completeGraph(d + 1));
  CHECK_THROWS_AS(mnl::fitGraphWeighted(loss, wrongLap, gs, cfg), std::invalid_argument);
}

TEST_CASE("estimator configuration is validated") {
  const auto truth = mnl::randomLowRank(4, 4, 1, 1.0, Centering::PerRow, 25);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 2, 26, 5);
  auto loss = mnl::LossHandle::kwise(mnl::ObservationSet::kwise(4, 4, rankings));

  EstimatorConfig cfg;
  CHECK_THROWS_AS(mnl::fit(loss, cfg), std::invalid_argument);  // lambda unset
  cfg.lambda = 0.1;
  cfg.tol = -1.0;
  CHECK_THROWS_AS(mnl::fit(loss, cfg), std::invalid_argument);
  cfg.tol = 1e-8;
  cfg.centering = Centering::PerGroup;
  CHECK_THROWS_AS(mnl::fit(loss, cfg), std::invalid_argument);  // groups missing

  cfg.centering = Centering::PerRow;
  cfg.init = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(mnl::fit(loss, cfg), std::invalid_argument);  // wrong init shape
}

TEST_CASE("trace csv has one row per accepted step plus the start") {
  const auto truth = mnl::randomLowRank(6, 6, 1, 1.0, Centering::PerRow, 27);
  const auto rankings = mnl::sampleKwiseSequential(truth.theta, 3, 28, 10);
  EstimatorConfig cfg;
  cfg.lambda = mnl::kwisePracticalLambda(6, 3);
  const auto result =
      mnl::fit(mnl::LossHandle::kwise(mnl::ObservationSet::kwise(6, 6, rankings)), cfg);

  std::stringstream buffer;
  mnl::writeTraceCsv(buffer, result);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(buffer, line)) ++lines;
  CHECK(lines == result.objectiveTrace.size() + 1);  // header + rows
}
