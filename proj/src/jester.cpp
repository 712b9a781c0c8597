#include <mnl/jester.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <mnl/likelihood.hpp>
#include <mnl/metrics.hpp>
#include <mnl/random.hpp>
#include <mnl/sampler.hpp>

namespace mnl {

namespace {

constexpr double kUnratedSentinel = 99.0;

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

/// k draws without replacement, probability proportional to weight among the
/// remaining items.
std::vector<Index> weightedSampleWithoutReplacement(const Vector& weights, Index k,
                                                    RandomStream& rng) {
  std::vector<double> w(weights.data(), weights.data() + weights.size());
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<Index> picked;
  picked.reserve(k);
  for (Index draw = 0; draw < k; ++draw) {
    double u = rng.uniform() * total;
    Index choice = -1;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] <= 0.0) continue;
      u -= w[j];
      choice = static_cast<Index>(j);
      if (u <= 0.0) break;
    }
    picked.push_back(choice);
    total -= w[choice];
    w[choice] = 0.0;
  }
  return picked;
}

/// Ranking of the selected jokes by the user's scores, best first; ties break
/// toward the smaller joke index.
KWiseRanking rankByScores(Index user, std::vector<Index> selected, const Matrix& scores) {
  KWiseRanking r;
  r.user = user;
  r.items = std::move(selected);
  r.ranking.resize(r.items.size());
  std::iota(r.ranking.begin(), r.ranking.end(), Index{0});
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](Index a, Index b) {
    const double sa = scores(user, r.items[a]);
    const double sb = scores(user, r.items[b]);
    if (sa != sb) return sa > sb;
    return r.items[a] < r.items[b];
  });
  return r;
}

}  // namespace

JesterTable loadJester(std::istream& in, Index jokeCount) {
  JesterTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> fields;
    while (std::getline(ls, cell, ',')) {
      try {
        fields.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("loadJester: line " + std::to_string(lineNo) +
                                    ": bad number '" + cell + "'");
      }
    }
    if (static_cast<Index>(fields.size()) != jokeCount + 1) {
      throw std::invalid_argument("loadJester: line " + std::to_string(lineNo) + ": expected " +
                                  std::to_string(jokeCount + 1) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    for (Index j = 1; j <= jokeCount; ++j) {
      const double v = fields[static_cast<std::size_t>(j)];
      if (v != kUnratedSentinel && (v < -10.0 || v > 10.0)) {
        throw std::invalid_argument("loadJester: line " + std::to_string(lineNo) +
                                    ": rating out of [-10, 10]: " + std::to_string(v));
      }
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw std::invalid_argument("loadJester: empty file");

  table.ratings.resize(static_cast<Index>(rows.size()), jokeCount);
  for (Index u = 0; u < table.ratings.rows(); ++u) {
    bool complete = true;
    for (Index j = 0; j < jokeCount; ++j) {
      const double v = rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(j + 1)];
      table.ratings(u, j) = v;
      complete = complete && v != kUnratedSentinel;
    }
    const double declared = rows[static_cast<std::size_t>(u)][0];
    if (complete && declared >= static_cast<double>(jokeCount)) {
      table.completeRaters.push_back(u);
    }
  }
  return table;
}

JesterTable loadJesterFile(const std::string& path, Index jokeCount) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("loadJesterFile: cannot open " + path);
  return loadJester(in, jokeCount);
}

JesterTable syntheticJesterTable(Index users, Index jokes, std::uint64_t seed) {
  if (users < 2 || jokes < 2) {
    throw std::invalid_argument("syntheticJesterTable: need at least 2 users and jokes");
  }
  RandomStream rng(seed);
  Vector shared(jokes), split(jokes);
  for (Index j = 0; j < jokes; ++j) shared(j) = 2.0 * rng.uniform() - 1.0;
  for (Index j = 0; j < jokes; ++j) split(j) = 2.0 * rng.uniform() - 1.0;

  // Two opposed clusters dominate; a small shared taste and per-user noise
  // keep the scores continuous and full rank.
  JesterTable table;
  table.ratings.resize(users, jokes);
  for (Index u = 0; u < users; ++u) {
    const double sign = (u % 2 == 0) ? 1.0 : -1.0;
    for (Index j = 0; j < jokes; ++j) {
      const double noise = 0.05 * (2.0 * rng.uniform() - 1.0);
      double score = 6.0 * sign * split(j) + 1.5 * shared(j) + noise;
      table.ratings(u, j) = std::clamp(score, -10.0, 10.0);
    }
    table.completeRaters.push_back(u);
  }
  return table;
}

std::string JesterSpec::canonical() const {
  std::ostringstream out;
  out << "jester;k=";
  for (auto k : kGrid) out << k << "|";
  out << ";maxUsers=" << maxUsers << ";lambdaScale=" << lambdaScale << ";seed=" << seed
      << ";maxIters=" << maxIters << ";tol=" << tol;
  return out.str();
}

ResultTable runJesterExperiment(const JesterTable& table, const JesterSpec& spec) {
  if (spec.kGrid.empty()) throw std::invalid_argument("runJesterExperiment: empty k grid");
  if (table.completeRaters.empty()) {
    throw std::invalid_argument("runJesterExperiment: no complete raters");
  }
  const Index jokes = table.ratings.cols();
  const std::string hash = formatHash(specHash(spec.canonical()));

  // Deterministic subsample of the complete raters.
  std::vector<Index> raters = table.completeRaters;
  {
    RandomStream rng(spec.seed);
    for (std::size_t i = raters.size(); i > 1; --i) {
      std::swap(raters[i - 1], raters[static_cast<std::size_t>(rng.uniformInt(i))]);
    }
  }
  if (static_cast<Index>(raters.size()) > spec.maxUsers) {
    raters.resize(static_cast<std::size_t>(spec.maxUsers));
  }
  const Index users = static_cast<Index>(raters.size());

  // Compact score matrix indexed by subsample position.
  Matrix scores(users, jokes);
  for (Index u = 0; u < users; ++u) scores.row(u) = table.ratings.row(raters[u]);

  // Popularity-proportional selection bias: jokes with stronger mean absolute
  // ratings are more likely to be offered. The weight follows the popularity
  // rank with a bounded 2:1 skew so no joke is starved of appearances.
  Vector weights(jokes);
  {
    const Vector popularity = scores.cwiseAbs().colwise().mean().transpose();
    std::vector<Index> order(jokes);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (popularity(a) != popularity(b)) return popularity(a) < popularity(b);
      return a < b;
    });
    for (Index pos = 0; pos < jokes; ++pos) {
      weights(order[pos]) = 1.0 + static_cast<double>(pos) / static_cast<double>(jokes - 1);
    }
  }

  ResultTable out;
  out.columns = {"spec_hash",  "k",         "seed",     "users",       "lambda",     "iterations",
                 "converged",  "residual",  "heldout_pairs", "convex_error", "borda_error"};

  for (Index k : spec.kGrid) {
    if (k < 2 || k >= jokes) {
      throw std::invalid_argument("runJesterExperiment: k must be in [2, jokes)");
    }
    RandomStream rng(spec.seed * 1000003 + static_cast<std::uint64_t>(k));

    std::vector<KWiseRanking> rankings;
    rankings.reserve(users);
    std::vector<PairwiseComparison> heldout;
    for (Index u = 0; u < users; ++u) {
      std::vector<Index> selected = weightedSampleWithoutReplacement(weights, k, rng);
      std::vector<bool> isSelected(jokes, false);
      for (Index j : selected) isSelected[j] = true;
      rankings.push_back(rankByScores(u, std::move(selected), scores));
      // Held-out pairs: every pair among the unselected jokes, truth from the
      // continuous scores, ties toward the smaller index.
      for (Index a = 0; a < jokes; ++a) {
        if (isSelected[a]) continue;
        for (Index b = a + 1; b < jokes; ++b) {
          if (isSelected[b]) continue;
          const double sa = scores(u, a);
          const double sb = scores(u, b);
          heldout.push_back({u, a, b, sa >= sb});  // tie: a < b wins
        }
      }
    }

    LossHandle loss = LossHandle::kwise(ObservationSet::kwise(users, jokes, rankings));
    EstimatorConfig cfg;
    cfg.lambda = spec.lambdaScale * kwisePracticalLambda((users + jokes) / 2, k);
    cfg.maxIters = spec.maxIters;
    cfg.tol = spec.tol;
    cfg.centering = Centering::PerRow;
    const FitResult fitResult = fit(loss, cfg);

    const double convexError = predictionError(fitResult.thetaHat.theta, heldout);
    const Vector borda = -bordaScores(rankings, jokes);
    const double bordaError = pooledPredictionError(borda, heldout);

    out.rows.push_back({hash, std::to_string(k), std::to_string(spec.seed),
                        std::to_string(users), formatDouble(cfg.lambda),
                        std::to_string(fitResult.iterations), fitResult.converged ? "1" : "0",
                        formatDouble(fitResult.fixedPointResidual),
                        std::to_string(heldout.size()), formatDouble(convexError),
                        formatDouble(bordaError)});
  }
  return out;
}

}  // namespace mnl
