/// @file  acceptance_main.cpp
/// @brief End-to-end acceptance suite. Each criterion prints one PASS/FAIL
///        line; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <mnl/estimator.hpp>
#include <mnl/experiments.hpp>
#include <mnl/jester.hpp>
#include <mnl/likelihood.hpp>
#include <mnl/linalg.hpp>
#include <mnl/metrics.hpp>
#include <mnl/sampler.hpp>

#include "test_util.hpp"

using namespace mnl;
using Clock = std::chrono::steady_clock;

namespace {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t column(const ResultTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == name) return i;
  }
  throw std::logic_error("missing column " + name);
}

double cell(const ResultTable& table, std::size_t row, const std::string& name) {
  return std::stod(table.rows[row][column(table, name)]);
}

/// Residuals of every run in a table, for the criterion-3 sweep.
void collectResiduals(const ResultTable& table, std::vector<double>* out) {
  const std::size_t c = column(table, "residual");
  for (const auto& row : table.rows) out->push_back(std::stod(row[c]));
}

double relativeError(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(a.norm(), 1e-12);
}

// ---------------------------------------------------------------------------

CriterionResult criterion1() {
  const auto start = Clock::now();
  CriterionResult out{1, "gradient correctness (finite differences)"};

  const Index d1 = 6, d2 = 6, k = 3, k1 = 2, k2 = 2;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Matrix truth = testutil::randomMatrix(d1, d2, 10 + i, 1.5);
    const Matrix at = testutil::randomMatrix(d1, d2, 300 + i, 0.8);

    const auto pairs = samplePairwise(truth, completeGraph(d2), 40, 1000 + i);
    worst = std::max(worst, relativeError(pairwiseGrad(at, pairs),
                                          testutil::finiteDifferenceGradient(
                                              [&](const Matrix& t) { return pairwiseNll(t, pairs); },
                                              at)));

    const auto rankings = sampleKwiseSequential(truth, k, 2000 + i, 3);
    worst = std::max(worst, relativeError(kwiseGrad(at, rankings),
                                          testutil::finiteDifferenceGradient(
                                              [&](const Matrix& t) { return kwiseNll(t, rankings); },
                                              at)));

    const auto broken = breakRankings(rankings);
    worst = std::max(worst,
                     relativeError(rankBrokenGrad(at, broken),
                                   testutil::finiteDifferenceGradient(
                                       [&](const Matrix& t) { return rankBrokenNll(t, broken); },
                                       at)));

    const auto bundles = sampleBundled(truth, k1, k2, 40, 3000 + i);
    worst = std::max(worst, relativeError(bundledGrad(at, bundles),
                                          testutil::finiteDifferenceGradient(
                                              [&](const Matrix& t) { return bundledNll(t, bundles); },
                                              at)));

    const auto choices = sampleChoices(truth, k, 40, 4000 + i);
    worst = std::max(worst, relativeError(choiceGrad(at, choices),
                                          testutil::finiteDifferenceGradient(
                                              [&](const Matrix& t) { return choiceNll(t, choices); },
                                              at)));
  }
  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "max relative error " << worst << " (need <= 1e-6), " << out.seconds
         << "s (need < 10s)";
  out.detail = detail.str();
  out.pass = worst <= 1e-6 && out.seconds < 10.0;
  return out;
}

CriterionResult criterion2() {
  const auto start = Clock::now();
  CriterionResult out{2, "RUM equivalence (sequential vs Gumbel)"};

  // Two-sample chi-square over ranked item sequences, d2 = 4, k = 3, one user.
  Matrix theta(1, 4);
  theta << 0.8, -0.3, 0.1, -0.6;
  const Index draws = 100000;
  const auto sequential = sampleKwiseSequential(theta, 3, 101, draws);
  const auto gumbel = sampleKwiseGumbel(theta, 3, 202, draws);
  std::vector<std::size_t> a(64, 0), b(64, 0);
  auto cellOf = [](const KWiseRanking& r) {
    std::size_t c = 0;
    for (Index pos : r.ranking) c = c * 4 + static_cast<std::size_t>(r.items[pos]);
    return c;
  };
  for (const auto& r : sequential) ++a[cellOf(r)];
  for (const auto& r : gumbel) ++b[cellOf(r)];
  const double p = testutil::twoSampleChiSquareP(a, b);

  // Exact enumeration: the sequential per-step conditionals must reproduce
  // the multiset product formula, and each family must sum to one.
  double worstGap = 0.0;
  double worstTotal = 0.0;
  const std::vector<std::vector<Index>> multisets = {{0, 1, 2}, {0, 0, 1}, {1, 3, 3}};
  for (const auto& items : multisets) {
    std::vector<Index> order = {0, 1, 2};
    double total = 0.0;
    do {
      // Product formula over the item multiset, removing one copy per pick.
      std::vector<Index> remaining = items;
      double product = 1.0;
      for (Index pos : order) {
        const Index item = items[pos];
        double denom = 0.0;
        for (Index j : remaining) denom += std::exp(theta(0, j));
        product *= std::exp(theta(0, item)) / denom;
        remaining.erase(std::find(remaining.begin(), remaining.end(), item));
      }
      // The likelihood module's sequential evaluation of the same ranking.
      KWiseRanking r;
      r.user = 0;
      r.items = items;
      r.ranking = order;
      const double fromNll = std::exp(-3.0 * kwiseNll(theta, {r}));
      worstGap = std::max(worstGap, std::abs(fromNll - product));
      total += product;
    } while (std::next_permutation(order.begin(), order.end()));
    worstTotal = std::max(worstTotal, std::abs(total - 1.0));
  }

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "chi-square p = " << p << " (need > 0.001), enumeration gap " << worstGap
         << ", probability total gap " << worstTotal << " (need <= 1e-12)";
  out.detail = detail.str();
  out.pass = p > 0.001 && worstGap <= 1e-12 && worstTotal <= 1e-12;
  return out;
}

CriterionResult criterion3(const std::vector<double>& experimentResiduals, double tol) {
  const auto start = Clock::now();
  CriterionResult out{3, "prox correctness and fixed points"};

  // Diagonal soft-thresholding to 1e-12, mixed signs and thresholds.
  double worstSvt = 0.0;
  for (double tau : {0.0, 0.4, 1.0, 2.5}) {
    Matrix d = Matrix::Zero(4, 4);
    d(0, 0) = 3.0;
    d(1, 1) = -1.5;
    d(2, 2) = 0.2;
    d(3, 3) = -4.0;
    const Matrix t = svt(d, tau);
    for (Index i = 0; i < 4; ++i) {
      const double x = d(i, i);
      const double expected = (std::abs(x) <= tau) ? 0.0 : x - (x > 0 ? tau : -tau);
      worstSvt = std::max(worstSvt, std::abs(t(i, i) - expected));
    }
    Matrix offDiag = t;
    offDiag.diagonal().setZero();
    worstSvt = std::max(worstSvt, offDiag.cwiseAbs().maxCoeff());
  }

  double worstResidual = 0.0;
  for (double r : experimentResiduals) worstResidual = std::max(worstResidual, r);

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "svt diagonal error " << worstSvt << " (need <= 1e-12), max fixed-point residual "
         << worstResidual << " over " << experimentResiduals.size() << " experiment runs (need <= "
         << 10.0 * tol << ")";
  out.detail = detail.str();
  out.pass = worstSvt <= 1e-12 && worstResidual <= 10.0 * tol && !experimentResiduals.empty();
  return out;
}

CriterionResult criterion4() {
  const auto start = Clock::now();
  CriterionResult out{4, "convexity and invariance suites"};

  const Index d1 = 5, d2 = 6;
  const Matrix truth = testutil::randomMatrix(d1, d2, 900, 1.2);
  const auto pairs = samplePairwise(truth, completeGraph(d2), 60, 901);
  const auto rankings = sampleKwiseSequential(truth, 3, 902, 4);
  const auto broken = breakRankings(rankings);
  const auto bundles = sampleBundled(truth, 2, 2, 60, 903);
  const auto choices = sampleChoices(truth, 3, 60, 904);

  double convexitySlack = -1e300;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Matrix a = testutil::randomMatrix(d1, d2, 1000 + s);
    const Matrix b = testutil::randomMatrix(d1, d2, 2000 + s);
    for (double t : {0.25, 0.5, 0.75}) {
      const Matrix mix = t * a + (1.0 - t) * b;
      auto probe = [&](auto&& f) {
        convexitySlack = std::max(convexitySlack, f(mix) - t * f(a) - (1.0 - t) * f(b));
      };
      probe([&](const Matrix& m) { return pairwiseNll(m, pairs); });
      probe([&](const Matrix& m) { return kwiseNll(m, rankings); });
      probe([&](const Matrix& m) { return rankBrokenNll(m, broken); });
      probe([&](const Matrix& m) { return bundledNll(m, bundles); });
      probe([&](const Matrix& m) { return choiceNll(m, choices); });
    }
  }

  // Shift invariance under each identifiability class.
  double shiftGap = 0.0;
  {
    const Matrix at = testutil::randomMatrix(d1, d2, 3000);
    Matrix rowShift = at;
    for (Index i = 0; i < d1; ++i) rowShift.row(i).array() += 0.7 * (i + 1);
    shiftGap = std::max(shiftGap, std::abs(kwiseNll(at, rankings) - kwiseNll(rowShift, rankings)));
    shiftGap = std::max(shiftGap,
                        std::abs(rankBrokenNll(at, broken) - rankBrokenNll(rowShift, broken)));
    shiftGap = std::max(shiftGap, std::abs(choiceNll(at, choices) - choiceNll(rowShift, choices)));

    // Pairwise: a constant shift over any connected group (here all items).
    Matrix columnShift = at;
    columnShift.array() += 2.25;
    shiftGap = std::max(shiftGap,
                        std::abs(pairwiseNll(at, pairs) - pairwiseNll(columnShift, pairs)));

    Matrix globalShift = at;
    globalShift.array() += -3.5;
    shiftGap = std::max(shiftGap,
                        std::abs(bundledNll(at, bundles) - bundledNll(globalShift, bundles)));
  }

  // Gradient null-space conditions.
  double nullGap = 0.0;
  {
    const Matrix at = testutil::randomMatrix(d1, d2, 4000);
    nullGap = std::max(nullGap, kwiseGrad(at, rankings).rowwise().sum().cwiseAbs().maxCoeff());
    nullGap = std::max(nullGap, rankBrokenGrad(at, broken).rowwise().sum().cwiseAbs().maxCoeff());
    nullGap = std::max(nullGap, choiceGrad(at, choices).rowwise().sum().cwiseAbs().maxCoeff());
    nullGap = std::max(nullGap, pairwiseGrad(at, pairs).rowwise().sum().cwiseAbs().maxCoeff());
    nullGap = std::max(nullGap, std::abs(bundledGrad(at, bundles).sum()));
  }

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "convexity slack " << convexitySlack << " (need <= 1e-10), shift gap " << shiftGap
         << ", gradient null-space gap " << nullGap << " (need <= 1e-12)";
  out.detail = detail.str();
  out.pass = convexitySlack <= 1e-10 && shiftGap <= 1e-12 && nullGap <= 1e-12;
  return out;
}

CriterionResult criterion5(std::vector<double>* residuals) {
  const auto start = Clock::now();
  CriterionResult out{5, "k-wise error scaling in k"};

  KwiseSpec spec;
  spec.d = 50;
  spec.rankGrid = {3};
  spec.alpha = 5.0;
  spec.kGrid = {32, 128};
  spec.seeds = {1, 2, 3, 4, 5};
  const ResultTable table = runKwiseExperiment(spec);
  collectResiduals(table, residuals);

  std::map<Index, double> sums;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    sums[static_cast<Index>(cell(table, i, "k"))] += cell(table, i, "rmse");
  }
  const double ratio = sums[128] / sums[32];

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "RMSE(k=128)/RMSE(k=32) = " << ratio << " (need in [0.35, 0.65]), " << out.seconds
         << "s (need < 300s)";
  out.detail = detail.str();
  out.pass = ratio >= 0.35 && ratio <= 0.65 && out.seconds < 300.0;
  return out;
}

CriterionResult criterion6(std::vector<double>* residuals) {
  const auto start = Clock::now();
  CriterionResult out{6, "lambda insensitivity window and over-regularization"};

  // Window: multipliers 2^0..2^8 stay within a factor two of each other.
  LambdaSweepSpec window;
  window.d = 50;
  window.rank = 3;
  window.alphaGrid = {5.0};
  window.k = 32;
  window.multiplierExponents = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  window.seeds = {1, 2, 3};
  const ResultTable windowTable = runLambdaSweep(window);
  collectResiduals(windowTable, residuals);

  std::map<int, std::pair<double, int>> perExponent;
  for (std::size_t i = 0; i < windowTable.rows.size(); ++i) {
    auto& slot = perExponent[static_cast<int>(cell(windowTable, i, "multiplier_exp"))];
    slot.first += cell(windowTable, i, "rmse");
    slot.second += 1;
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& [exp, slot] : perExponent) {
    const double mean = slot.first / slot.second;
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  const double spread = hi / lo;

  // Strict growth past the window needs an instance whose 2^4 multiplier is
  // still below the annihilation point; k = 1024 provides it.
  LambdaSweepSpec tail;
  tail.d = 50;
  tail.rank = 3;
  tail.alphaGrid = {5.0};
  tail.k = 1024;
  tail.multiplierExponents = {4, 16};
  tail.seeds = {1, 2, 3};
  const ResultTable tailTable = runLambdaSweep(tail);
  collectResiduals(tailTable, residuals);

  std::map<std::uint64_t, std::map<int, double>> bySeed;
  for (std::size_t i = 0; i < tailTable.rows.size(); ++i) {
    bySeed[static_cast<std::uint64_t>(cell(tailTable, i, "seed"))]
          [static_cast<int>(cell(tailTable, i, "multiplier_exp"))] = cell(tailTable, i, "rmse");
  }
  bool strictlyWorse = true;
  for (auto& [seed, values] : bySeed) strictlyWorse = strictlyWorse && values[16] > values[4];

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "window max/min = " << spread << " (need <= 2), RMSE(2^16) > RMSE(2^4) on all seeds: "
         << (strictlyWorse ? "yes" : "no") << ", " << out.seconds << "s (need < 300s)";
  out.detail = detail.str();
  out.pass = spread <= 2.0 && strictlyWorse && out.seconds < 300.0;
  return out;
}

CriterionResult criterion7(std::vector<double>* residuals) {
  const auto start = Clock::now();
  CriterionResult out{7, "graph topology effect"};

  // Biased preference matrices: small-gap topologies lose in Frobenius error.
  GraphTopologySpec biased;
  biased.thetaKind = ThetaKind::BarbellBiased;
  biased.topologies = {Topology::Complete, Topology::Line, Topology::Barbell};
  biased.sampleGrid = {1u << 15};
  biased.seeds = {1, 2, 3};
  const ResultTable biasedTable = runGraphTopologyExperiment(biased);
  collectResiduals(biasedTable, residuals);

  std::map<std::string, std::pair<double, int>> rmseByTopology;
  for (std::size_t i = 0; i < biasedTable.rows.size(); ++i) {
    auto& slot = rmseByTopology[biasedTable.rows[i][column(biasedTable, "topology")]];
    slot.first += cell(biasedTable, i, "rmse");
    slot.second += 1;
  }
  const double completeRmse = rmseByTopology["complete"].first / rmseByTopology["complete"].second;
  const double lineRmse = rmseByTopology["line"].first / rmseByTopology["line"].second;
  const double barbellRmse = rmseByTopology["barbell"].first / rmseByTopology["barbell"].second;

  // I.i.d. preference matrices: the Laplacian metric is topology-insensitive.
  GraphTopologySpec iid;
  iid.thetaKind = ThetaKind::Iid;
  iid.sampleGrid = {1u << 15};
  iid.seeds = {1, 2, 3, 4, 5};
  const ResultTable iidTable = runGraphTopologyExperiment(iid);
  collectResiduals(iidTable, residuals);

  std::map<std::string, std::pair<double, int>> lrmseByTopology;
  for (std::size_t i = 0; i < iidTable.rows.size(); ++i) {
    auto& slot = lrmseByTopology[iidTable.rows[i][column(iidTable, "topology")]];
    slot.first += cell(iidTable, i, "l_rmse");
    slot.second += 1;
  }
  double lrmseLo = 1e300, lrmseHi = 0.0;
  for (const auto& [name, slot] : lrmseByTopology) {
    const double mean = slot.first / slot.second;
    lrmseLo = std::min(lrmseLo, mean);
    lrmseHi = std::max(lrmseHi, mean);
  }

  // Complete-graph error decay over the sample grid.
  GraphTopologySpec decay;
  decay.thetaKind = ThetaKind::Iid;
  decay.topologies = {Topology::Complete};
  decay.sampleGrid = {1u << 11, 1u << 12, 1u << 13, 1u << 14, 1u << 15};
  decay.seeds = {1, 2, 3, 4, 5};
  const ResultTable decayTable = runGraphTopologyExperiment(decay);
  collectResiduals(decayTable, residuals);

  std::map<double, std::pair<double, int>> rmseByN;
  for (std::size_t i = 0; i < decayTable.rows.size(); ++i) {
    auto& slot = rmseByN[cell(decayTable, i, "n")];
    slot.first += cell(decayTable, i, "rmse");
    slot.second += 1;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& [n, slot] : rmseByN) {
    const double x = std::log2(n);
    const double y = std::log2(slot.first / slot.second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "biased RMSE: line/complete = " << lineRmse / completeRmse
         << ", barbell/complete = " << barbellRmse / completeRmse
         << " (need >= 1.25); iid L-RMSE max/min = " << lrmseHi / lrmseLo
         << " (need <= 1.3); slope = " << slope << " (need in [-0.65, -0.35]); " << out.seconds
         << "s (need < 900s)";
  out.detail = detail.str();
  out.pass = lineRmse >= 1.25 * completeRmse && barbellRmse >= 1.25 * completeRmse &&
             lrmseHi <= 1.3 * lrmseLo && slope >= -0.65 && slope <= -0.35 &&
             out.seconds < 900.0;
  return out;
}

CriterionResult criterion8(std::vector<double>* residuals) {
  const auto start = Clock::now();
  CriterionResult out{8, "joint inference beats separate per-group fits"};

  GroupSpec spec;
  spec.groupGrid = {4};
  spec.samples = 1u << 14;
  spec.seeds = {1, 2, 3, 4, 5};
  const ResultTable table = runGroupExperiment(spec);
  collectResiduals(table, residuals);

  bool allSeeds = true;
  std::ostringstream margins;
  for (std::size_t i = 0; i < table.rows.size(); i += 2) {
    const double joint = cell(table, i, "l_rmse");
    const double separate = cell(table, i + 1, "l_rmse");
    allSeeds = allSeeds && joint <= separate;
    margins << " " << separate / joint;
  }

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "joint <= separate L-RMSE on every seed: " << (allSeeds ? "yes" : "no")
         << " (separate/joint ratios:" << margins.str() << "), " << out.seconds
         << "s (need < 600s)";
  out.detail = detail.str();
  out.pass = allSeeds && out.seconds < 600.0;
  return out;
}

CriterionResult criterion9() {
  const auto start = Clock::now();
  CriterionResult out{9, "rank breaking tracks the full k-wise estimator"};

  const Index d = 30, k = 8, rounds = 10;
  double fullSum = 0.0, brokenSum = 0.0, zeroSum = 0.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto truth = randomLowRank(d, d, 2, 5.0, Centering::PerRow, s);
    const auto rankings = sampleKwiseSequential(truth.theta, k, s * 7919 + 17, rounds);

    EstimatorConfig kwiseCfg;
    kwiseCfg.lambda = kwisePracticalLambda(d, k, rounds);
    const auto full = fit(LossHandle::kwise(ObservationSet::kwise(d, d, rankings)), kwiseCfg);

    EstimatorConfig brokenCfg;
    brokenCfg.lambda = 0.25 * rankBrokenLambdaZero(d, d, k) / std::sqrt(double(rounds));
    const auto broken = fitRankBroken(rankings, d, d, brokenCfg);

    fullSum += rmse(full.thetaHat.theta, truth.theta);
    brokenSum += rmse(broken.thetaHat.theta, truth.theta);
    zeroSum += rmse(Matrix::Zero(d, d), truth.theta);
  }
  const double ratio = brokenSum / fullSum;

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "rank-broken/full RMSE = " << ratio << " (need <= 1.5); both informative: full "
         << fullSum / 5 << ", broken " << brokenSum / 5 << " vs zero " << zeroSum / 5;
  out.detail = detail.str();
  out.pass = ratio <= 1.5 && fullSum < 0.9 * zeroSum && brokenSum < 0.9 * zeroSum;
  return out;
}

CriterionResult criterion10() {
  const auto start = Clock::now();
  CriterionResult out{10, "bundled estimator sanity"};

  double fitSum = 0.0, zeroSum = 0.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto truth = randomLowRank(30, 30, 2, 2.0, Centering::Global, s);
    const auto data = sampleBundled(truth.theta, 4, 4, 30000, s * 7919 + 17);
    EstimatorConfig cfg;
    cfg.lambda = 0.125 * bundledLambda(2.0, 30, 30, 30000);
    cfg.centering = Centering::Global;
    const auto result = fit(LossHandle::bundled(ObservationSet::bundled(30, 30, data)), cfg);
    fitSum += rmse(result.thetaHat.theta, truth.theta);
    zeroSum += rmse(Matrix::Zero(30, 30), truth.theta);
  }

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << "fitted RMSE " << fitSum / 5 << " vs zero " << zeroSum / 5 << " (need < 0.5x)";
  out.detail = detail.str();
  out.pass = fitSum < 0.5 * zeroSum;
  return out;
}

CriterionResult criterion11() {
  const auto start = Clock::now();
  CriterionResult out{11, "held-out prediction beats the Borda baseline"};

  JesterSpec spec;
  spec.kGrid = {20, 40, 60};
  spec.maxUsers = 2000;
  spec.seed = 1;

  JesterTable table;
  bool realData = false;
  if (const char* path = std::getenv("MNL_JESTER_CSV")) {
    table = loadJesterFile(path);
    realData = true;
  } else {
    table = syntheticJesterTable(400, 100, 1);
  }
  const ResultTable result = runJesterExperiment(table, spec);

  bool ordering = true;
  std::ostringstream pairsText;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const double convex = cell(result, i, "convex_error");
    const double borda = cell(result, i, "borda_error");
    ordering = ordering && convex <= borda;
    pairsText << " k=" << result.rows[i][column(result, "k")] << ": " << convex << " vs " << borda;
  }

  out.seconds = elapsed(start);
  std::ostringstream detail;
  detail << (realData ? "real dataset" : "synthetic stand-in")
         << "; convex <= Borda for every k: " << (ordering ? "yes" : "no") << " ("
         << pairsText.str() << "), " << out.seconds << "s (need < 1200s)";
  out.detail = detail.str();
  out.pass = ordering && out.seconds < 1200.0;
  return out;
}

}  // namespace

int main() {
  std::vector<CriterionResult> results;
  std::vector<double> experimentResiduals;
  const double experimentTol = 1e-8;

  results.push_back(criterion1());
  results.push_back(criterion2());
  results.push_back(criterion4());
  results.push_back(criterion5(&experimentResiduals));
  results.push_back(criterion6(&experimentResiduals));
  results.push_back(criterion7(&experimentResiduals));
  results.push_back(criterion8(&experimentResiduals));
  results.push_back(criterion9());
  results.push_back(criterion10());
  results.push_back(criterion11());
  results.push_back(criterion3(experimentResiduals, experimentTol));

  std::sort(results.begin(), results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });

  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s -- %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str(), r.seconds);
    failures += r.pass ? 0 : 1;
  }
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures;
}
