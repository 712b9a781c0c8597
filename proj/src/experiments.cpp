#include <mnl/experiments.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <mnl/likelihood.hpp>
#include <mnl/linalg.hpp>
#include <mnl/metrics.hpp>
#include <mnl/preference.hpp>
#include <mnl/sampler.hpp>

#include <map>
#include <mutex>

namespace mnl {

namespace {

/// Runs fn(i) for i in [0, count) on a small worker pool. Work items own all
/// their state and write into pre-indexed slots, so the result does not
/// depend on the thread count.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned int workers = threads > 0 ? static_cast<unsigned int>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned int>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorMutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string formatDouble(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string formatHash(std::uint64_t h) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

template <typename T>
std::string joinGrid(const std::vector<T>& grid) {
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out << "|";
    out << grid[i];
  }
  return out.str();
}

PreferenceMatrix makeTheta(ThetaKind kind, Index d1, Index d2, Index r, double alpha,
                           std::uint64_t seed) {
  switch (kind) {
    case ThetaKind::Iid: return randomLowRank(d1, d2, r, alpha, Centering::PerRow, seed);
    case ThetaKind::BarbellBiased:
      return barbellBiased(d1, d2, r, alpha, alpha / 2.0, seed);
    case ThetaKind::LineBiased: return lineBiased(d1, d2, r, alpha, seed);
  }
  throw std::invalid_argument("makeTheta: unknown theta kind");
}

double policyLambda(GraphLambdaPolicy policy, const GraphLambda& detail) {
  switch (policy) {
    case GraphLambdaPolicy::SamplingBranch:
      return 2.0 * std::sqrt(32.0) * detail.samplingBranch;
    case GraphLambdaPolicy::FormulaMax:
      return detail.value;
  }
  throw std::invalid_argument("policyLambda: unknown policy");
}

void requireDistinctSeeds(const std::vector<std::uint64_t>& seeds) {
  for (std::size_t a = 0; a < seeds.size(); ++a)
    for (std::size_t b = a + 1; b < seeds.size(); ++b)
      if (seeds[a] == seeds[b]) {
        throw std::invalid_argument("experiment spec: seeds must be distinct");
      }
}

}  // namespace

std::string toString(GraphLambdaPolicy p) {
  return p == GraphLambdaPolicy::SamplingBranch ? "sampling-branch" : "formula-max";
}

void ResultTable::writeCsv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ",";
    out << columns[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
}

std::string toString(Topology t) {
  switch (t) {
    case Topology::Complete: return "complete";
    case Topology::Star: return "star";
    case Topology::Line: return "line";
    case Topology::Barbell: return "barbell";
  }
  return "complete";
}

Topology topologyFromString(const std::string& s) {
  if (s == "complete") return Topology::Complete;
  if (s == "star") return Topology::Star;
  if (s == "line") return Topology::Line;
  if (s == "barbell") return Topology::Barbell;
  throw std::invalid_argument("unknown topology: " + s);
}

SamplingGraph makeTopology(Topology t, Index d2) {
  switch (t) {
    case Topology::Complete: return completeGraph(d2);
    case Topology::Star: return starGraph(d2);
    case Topology::Line: return lineGraph(d2);
    case Topology::Barbell: return barbellGraph(d2);
  }
  throw std::invalid_argument("makeTopology: unknown topology");
}

std::string toString(ThetaKind k) {
  switch (k) {
    case ThetaKind::Iid: return "iid";
    case ThetaKind::BarbellBiased: return "barbell-biased";
    case ThetaKind::LineBiased: return "line-biased";
  }
  return "iid";
}

ThetaKind thetaKindFromString(const std::string& s) {
  if (s == "iid") return ThetaKind::Iid;
  if (s == "barbell-biased") return ThetaKind::BarbellBiased;
  if (s == "line-biased") return ThetaKind::LineBiased;
  throw std::invalid_argument("unknown theta kind: " + s);
}

std::uint64_t specHash(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string GraphTopologySpec::canonical() const {
  std::ostringstream out;
  out << "graph-topology;d1=" << d1 << ";d2=" << d2 << ";r=" << rank << ";alpha=" << alpha
      << ";theta=" << toString(thetaKind) << ";topologies=";
  for (auto t : topologies) out << toString(t) << "|";
  out << ";n=" << joinGrid(sampleGrid) << ";policy=" << toString(lambdaPolicy)
      << ";lambdaScale=" << lambdaScale << ";seeds=" << joinGrid(seeds)
      << ";maxIters=" << maxIters << ";tol=" << tol;
  return out.str();
}

ResultTable runGraphTopologyExperiment(const GraphTopologySpec& spec) {
  if (spec.topologies.empty() || spec.sampleGrid.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("runGraphTopologyExperiment: empty grid");
  }
  requireDistinctSeeds(spec.seeds);
  const std::string hash = formatHash(specHash(spec.canonical()));

  struct Point {
    Topology topology;
    std::size_t n;
    std::uint64_t seed;
    std::vector<std::string> row;
  };
  std::vector<Point> points;
  for (auto topology : spec.topologies)
    for (auto n : spec.sampleGrid)
      for (auto seed : spec.seeds) points.push_back({topology, n, seed, {}});

  parallelFor(points.size(), spec.threads, [&](std::size_t idx) {
    Point& pt = points[idx];
    const SamplingGraph graph = makeTopology(pt.topology, spec.d2);
    const Matrix lap = laplacian(graph);
    const GroupStructure gs = groups(graph);
    const double gap = spectralGap(lap, gs.count());
    const Matrix lHalf = laplacianPower(lap, 0.5, gs.count());

    const PreferenceMatrix truth =
        makeTheta(spec.thetaKind, spec.d1, spec.d2, spec.rank, spec.alpha, pt.seed);

    const auto comparisons = samplePairwise(truth.theta, graph, pt.n, pt.seed * 7919 + 17);
    LossHandle loss =
        LossHandle::pairwise(ObservationSet::pairwise(spec.d1, spec.d2, comparisons));

    const GraphLambda lambda = graphLambdaDetail(pt.n, spec.d1, spec.d2, gs.count(), gap);
    EstimatorConfig cfg;
    cfg.lambda = spec.lambdaScale * policyLambda(spec.lambdaPolicy, lambda);
    cfg.maxIters = spec.maxIters;
    cfg.tol = spec.tol;
    const FitResult fitResult = fitGraphWeighted(loss, lap, gs, cfg);

    // Diagnostics for the error-bound expression: the guarantee holds at the
    // full formula lambda, so the right-hand side is evaluated there.
    const double errL = laplacianFroNorm(truth.theta - fitResult.thetaHat.theta, lHalf);
    const double tail = sigmaTail(truth.theta * lHalf, spec.rank);
    const double boundLhs = errL * errL / static_cast<double>(spec.d1);
    const double boundRhs = graphBoundRhs(spec.alpha, lambda.value, spec.rank, errL, tail);

    pt.row = {hash,
              toString(spec.thetaKind),
              toString(pt.topology),
              std::to_string(pt.n),
              std::to_string(pt.seed),
              formatDouble(cfg.lambda),
              lambda.spectralBranchActive ? "spectral" : "sampling",
              std::to_string(fitResult.iterations),
              fitResult.converged ? "1" : "0",
              formatDouble(fitResult.fixedPointResidual),
              formatDouble(rmse(truth.theta, fitResult.thetaHat.theta)),
              formatDouble(laplacianRmse(truth.theta, fitResult.thetaHat.theta, lHalf)),
              formatDouble(sigmaTail(fitResult.thetaHat.theta, spec.rank)),
              formatDouble(boundLhs),
              formatDouble(boundRhs)};
  });

  ResultTable table;
  table.columns = {"spec_hash",  "theta_kind", "topology",  "n",
                   "seed",       "lambda",     "branch",    "iterations",
                   "converged",  "residual",   "rmse",      "l_rmse",
                   "sigma_tail", "bound_lhs",  "bound_rhs"};
  for (auto& pt : points) table.rows.push_back(std::move(pt.row));
  return table;
}

std::string GroupSpec::canonical() const {
  std::ostringstream out;
  out << "groups;d1=" << d1 << ";d2=" << d2 << ";r=" << rank << ";alpha=" << alpha
      << ";groups=" << joinGrid(groupGrid) << ";n=" << samples
      << ";policy=" << toString(lambdaPolicy) << ";lambdaScale=" << lambdaScale
      << ";seeds=" << joinGrid(seeds) << ";maxIters=" << maxIters << ";tol=" << tol;
  return out.str();
}

namespace {

/// Block-diagonal graph with one uniform complete component per group.
SamplingGraph groupedCompleteGraph(Index d2, Index groupCount) {
  if (groupCount < 1 || d2 % groupCount != 0) {
    throw std::invalid_argument("groupedCompleteGraph: groups must divide d2");
  }
  const Index size = d2 / groupCount;
  if (size < 2) throw std::invalid_argument("groupedCompleteGraph: groups of fewer than 2 items");
  Matrix p = Matrix::Zero(d2, d2);
  const double edges = static_cast<double>(groupCount) * size * (size - 1) / 2.0;
  const double w = 1.0 / (2.0 * edges);
  for (Index g = 0; g < groupCount; ++g) {
    for (Index a = g * size; a < (g + 1) * size; ++a)
      for (Index b = a + 1; b < (g + 1) * size; ++b) {
        p(a, b) = w;
        p(b, a) = w;
      }
  }
  return SamplingGraph(d2, std::move(p));
}

}  // namespace

ResultTable runGroupExperiment(const GroupSpec& spec) {
  if (spec.groupGrid.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("runGroupExperiment: empty grid");
  }
  requireDistinctSeeds(spec.seeds);
  const std::string hash = formatHash(specHash(spec.canonical()));

  struct Point {
    Index groupCount;
    std::uint64_t seed;
    std::vector<std::string> jointRow;
    std::vector<std::string> separateRow;
  };
  std::vector<Point> points;
  for (auto g : spec.groupGrid)
    for (auto seed : spec.seeds) points.push_back({g, seed, {}, {}});

  parallelFor(points.size(), spec.threads, [&](std::size_t idx) {
    Point& pt = points[idx];
    const SamplingGraph graph = groupedCompleteGraph(spec.d2, pt.groupCount);
    const Matrix lap = laplacian(graph);
    const GroupStructure gs = groups(graph);
    const double gap = spectralGap(lap, gs.count());
    const Matrix lHalf = laplacianPower(lap, 0.5, gs.count());

    const PreferenceMatrix truth =
        randomLowRank(spec.d1, spec.d2, spec.rank, spec.alpha, Centering::PerGroup, pt.seed, &gs);
    const auto comparisons = samplePairwise(truth.theta, graph, spec.samples, pt.seed * 7919 + 17);

    // Joint fit over the whole block-diagonal graph.
    LossHandle jointLoss =
        LossHandle::pairwise(ObservationSet::pairwise(spec.d1, spec.d2, comparisons));
    EstimatorConfig cfg;
    cfg.lambda = spec.lambdaScale *
                 policyLambda(spec.lambdaPolicy,
                              graphLambdaDetail(spec.samples, spec.d1, spec.d2, gs.count(), gap));
    cfg.maxIters = spec.maxIters;
    cfg.tol = spec.tol;
    const FitResult joint = fitGraphWeighted(jointLoss, lap, gs, cfg);

    // Separate fits, one per group, assembled into a full-size estimate.
    Matrix assembled = Matrix::Zero(spec.d1, spec.d2);
    Index separateIterations = 0;
    bool separateConverged = true;
    double lambdaSum = 0.0;
    double residualMax = 0.0;
    for (Index g = 0; g < gs.count(); ++g) {
      const std::vector<Index> members = gs.members(g);
      const Index sub = static_cast<Index>(members.size());
      std::vector<Index> position(spec.d2, -1);
      for (Index j = 0; j < sub; ++j) position[members[j]] = j;

      std::vector<PairwiseComparison> subData;
      for (const auto& c : comparisons) {
        if (position[c.itemA] >= 0 && position[c.itemB] >= 0) {
          subData.push_back({c.user, position[c.itemA], position[c.itemB], c.aWins});
        }
      }
      if (subData.empty()) continue;

      const SamplingGraph subGraph = completeGraph(sub);
      const Matrix subLap = laplacian(subGraph);
      const GroupStructure subGroups = groups(subGraph);
      EstimatorConfig subCfg;
      subCfg.lambda = spec.lambdaScale *
                      policyLambda(spec.lambdaPolicy,
                                   graphLambdaDetail(subData.size(), spec.d1, sub, 1,
                                                     spectralGap(subLap, 1)));
      subCfg.maxIters = spec.maxIters;
      subCfg.tol = spec.tol;
      LossHandle subLoss =
          LossHandle::pairwise(ObservationSet::pairwise(spec.d1, sub, subData));
      const FitResult part = fitGraphWeighted(subLoss, subLap, subGroups, subCfg);

      for (Index j = 0; j < sub; ++j) assembled.col(members[j]) = part.thetaHat.theta.col(j);
      separateIterations += part.iterations;
      separateConverged = separateConverged && part.converged;
      lambdaSum += subCfg.lambda;
      residualMax = std::max(residualMax, part.fixedPointResidual);
    }

    const std::string groupsStr = std::to_string(pt.groupCount);
    const std::string seedStr = std::to_string(pt.seed);
    const std::string nStr = std::to_string(spec.samples);
    pt.jointRow = {hash,
                   groupsStr,
                   nStr,
                   seedStr,
                   "joint",
                   formatDouble(cfg.lambda),
                   std::to_string(joint.iterations),
                   joint.converged ? "1" : "0",
                   formatDouble(joint.fixedPointResidual),
                   formatDouble(rmse(truth.theta, joint.thetaHat.theta)),
                   formatDouble(laplacianRmse(truth.theta, joint.thetaHat.theta, lHalf))};
    pt.separateRow = {hash,
                      groupsStr,
                      nStr,
                      seedStr,
                      "separate",
                      formatDouble(lambdaSum / static_cast<double>(gs.count())),
                      std::to_string(separateIterations),
                      separateConverged ? "1" : "0",
                      formatDouble(residualMax),
                      formatDouble(rmse(truth.theta, assembled)),
                      formatDouble(laplacianRmse(truth.theta, assembled, lHalf))};
  });

  ResultTable table;
  table.columns = {"spec_hash", "groups",    "n",        "seed",     "mode", "lambda",
                   "iterations", "converged", "residual", "rmse",     "l_rmse"};
  for (auto& pt : points) {
    table.rows.push_back(std::move(pt.jointRow));
    table.rows.push_back(std::move(pt.separateRow));
  }
  return table;
}

std::string toString(KwiseLambdaPolicy p) {
  return p == KwiseLambdaPolicy::Practical ? "practical" : "theory-low";
}

std::string KwiseSpec::canonical() const {
  std::ostringstream out;
  out << "kwise;d=" << d << ";r=" << joinGrid(rankGrid) << ";alpha=" << alpha
      << ";k=" << joinGrid(kGrid) << ";policy=" << toString(lambdaPolicy)
      << ";lambdaScale=" << lambdaScale << ";seeds=" << joinGrid(seeds)
      << ";maxIters=" << maxIters << ";tol=" << tol;
  return out.str();
}

ResultTable runKwiseExperiment(const KwiseSpec& spec) {
  if (spec.rankGrid.empty() || spec.kGrid.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("runKwiseExperiment: empty grid");
  }
  requireDistinctSeeds(spec.seeds);
  const std::string hash = formatHash(specHash(spec.canonical()));

  struct Point {
    Index rank;
    Index k;
    std::uint64_t seed;
    std::vector<std::string> row;
  };
  std::vector<Point> points;
  for (auto r : spec.rankGrid)
    for (auto k : spec.kGrid)
      for (auto seed : spec.seeds) points.push_back({r, k, seed, {}});

  parallelFor(points.size(), spec.threads, [&](std::size_t idx) {
    Point& pt = points[idx];
    const PreferenceMatrix truth =
        randomLowRank(spec.d, spec.d, pt.rank, spec.alpha, Centering::PerRow, pt.seed);
    const auto rankings = sampleKwiseSequential(truth.theta, pt.k, pt.seed * 7919 + 17);
    LossHandle loss = LossHandle::kwise(ObservationSet::kwise(spec.d, spec.d, rankings));

    double lambda = 0.0;
    switch (spec.lambdaPolicy) {
      case KwiseLambdaPolicy::Practical: lambda = kwisePracticalLambda(spec.d, pt.k); break;
      case KwiseLambdaPolicy::TheoryLow:
        lambda = kwiseLambdaTheory(spec.alpha, spec.d, spec.d, pt.k).lo;
        break;
    }
    EstimatorConfig cfg;
    cfg.lambda = spec.lambdaScale * lambda;
    cfg.maxIters = spec.maxIters;
    cfg.tol = spec.tol;
    cfg.centering = Centering::PerRow;
    const FitResult fitResult = fit(loss, cfg);

    const double rescaled =
        static_cast<double>(pt.k) / (static_cast<double>(pt.rank) * std::log(spec.d));
    pt.row = {hash,
              std::to_string(spec.d),
              std::to_string(pt.rank),
              std::to_string(pt.k),
              formatDouble(rescaled),
              formatDouble(spec.alpha),
              std::to_string(pt.seed),
              formatDouble(cfg.lambda),
              std::to_string(fitResult.iterations),
              fitResult.converged ? "1" : "0",
              formatDouble(fitResult.fixedPointResidual),
              formatDouble(rmse(truth.theta, fitResult.thetaHat.theta))};
  });

  ResultTable table;
  table.columns = {"spec_hash", "d",          "r",         "k",        "k_rescaled", "alpha",
                   "seed",      "lambda",     "iterations", "converged", "residual",  "rmse"};
  for (auto& pt : points) table.rows.push_back(std::move(pt.row));
  return table;
}

std::string LambdaSweepSpec::canonical() const {
  std::ostringstream out;
  out << "lambda-sweep;d=" << d << ";r=" << rank << ";alpha=" << joinGrid(alphaGrid)
      << ";k=" << k << ";exps=" << joinGrid(multiplierExponents) << ";seeds=" << joinGrid(seeds)
      << ";maxIters=" << maxIters << ";tol=" << tol;
  return out.str();
}

ResultTable runLambdaSweep(const LambdaSweepSpec& spec) {
  if (spec.alphaGrid.empty() || spec.multiplierExponents.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("runLambdaSweep: empty grid");
  }
  requireDistinctSeeds(spec.seeds);
  const std::string hash = formatHash(specHash(spec.canonical()));

  struct Point {
    double alpha;
    int exponent;
    std::uint64_t seed;
    std::vector<std::string> row;
  };
  std::vector<Point> points;
  for (auto alpha : spec.alphaGrid)
    for (auto e : spec.multiplierExponents)
      for (auto seed : spec.seeds) points.push_back({alpha, e, seed, {}});

  parallelFor(points.size(), spec.threads, [&](std::size_t idx) {
    Point& pt = points[idx];
    const PreferenceMatrix truth =
        randomLowRank(spec.d, spec.d, spec.rank, pt.alpha, Centering::PerRow, pt.seed);
    const auto rankings = sampleKwiseSequential(truth.theta, spec.k, pt.seed * 7919 + 17);
    LossHandle loss = LossHandle::kwise(ObservationSet::kwise(spec.d, spec.d, rankings));

    EstimatorConfig cfg;
    cfg.lambda = std::ldexp(kwisePracticalLambda(spec.d, spec.k), pt.exponent);
    cfg.maxIters = spec.maxIters;
    cfg.tol = spec.tol;
    cfg.centering = Centering::PerRow;
    const FitResult fitResult = fit(loss, cfg);

    pt.row = {hash,
              std::to_string(spec.d),
              std::to_string(spec.rank),
              std::to_string(spec.k),
              formatDouble(pt.alpha),
              std::to_string(pt.exponent),
              formatDouble(cfg.lambda),
              std::to_string(pt.seed),
              std::to_string(fitResult.iterations),
              fitResult.converged ? "1" : "0",
              formatDouble(fitResult.fixedPointResidual),
              formatDouble(rmse(truth.theta, fitResult.thetaHat.theta))};
  });

  ResultTable table;
  table.columns = {"spec_hash", "d",      "r",    "k",          "alpha",     "multiplier_exp",
                   "lambda",    "seed",   "iterations", "converged", "residual", "rmse"};
  for (auto& pt : points) table.rows.push_back(std::move(pt.row));
  return table;
}

}  // namespace mnl
