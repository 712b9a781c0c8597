#include <mnl/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <mnl/random.hpp>

namespace mnl {

namespace {

/// Categorical sampler over the ordered nonzero entries of a pair matrix.
class PairDistribution {
 public:
  explicit PairDistribution(const Matrix& p) {
    const Index d2 = p.rows();
    double cum = 0.0;
    for (Index a = 0; a < d2; ++a) {
      for (Index b = 0; b < d2; ++b) {
        if (p(a, b) > 0.0) {
          cum += p(a, b);
          cumulative_.push_back(cum);
          pairs_.emplace_back(a, b);
        }
      }
    }
    total_ = cum;
  }

  std::pair<Index, Index> draw(RandomStream& rng) const {
    const double u = rng.uniform() * total_;
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cumulative_.begin()),
                                     pairs_.size() - 1);
    return pairs_[idx];
  }

 private:
  std::vector<double> cumulative_;
  std::vector<std::pair<Index, Index>> pairs_;
  double total_ = 0.0;
};

/// Softmax draw over weights[i] = exp(logits[i] - max), restricted to the
/// positions still available.
Index drawSoftmax(const std::vector<double>& logits, const std::vector<bool>& taken,
                  RandomStream& rng) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!taken[i]) best = std::max(best, logits[i]);
  }
  double total = 0.0;
  std::vector<double> weights(logits.size(), 0.0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!taken[i]) {
      weights[i] = std::exp(logits[i] - best);
      total += weights[i];
    }
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (taken[i]) continue;
    u -= weights[i];
    if (u <= 0.0) return static_cast<Index>(i);
  }
  // Fall through only on roundoff; return the last available position.
  for (std::size_t i = logits.size(); i-- > 0;) {
    if (!taken[i]) return static_cast<Index>(i);
  }
  throw std::logic_error("drawSoftmax: no available position");
}

std::vector<Index> drawWithReplacement(Index universe, Index k, RandomStream& rng) {
  std::vector<Index> items(k);
  for (Index j = 0; j < k; ++j) items[j] = static_cast<Index>(rng.uniformInt(universe));
  return items;
}

}  // namespace

std::vector<PairwiseComparison> samplePairwise(const MatrixRef& theta, const SamplingGraph& g,
                                               std::size_t n, std::uint64_t seed) {
  if (theta.cols() != g.itemCount()) {
    throw std::invalid_argument("samplePairwise: theta columns must match graph items");
  }
  const Index d1 = theta.rows();
  RandomStream rng(seed);
  PairDistribution pairs(g.weights());

  std::vector<PairwiseComparison> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Index user = static_cast<Index>(rng.uniformInt(d1));
    const auto [a, b] = pairs.draw(rng);
    const double z = theta(user, a) - theta(user, b);
    const double pWin = 1.0 / (1.0 + std::exp(-z));
    out.push_back({user, a, b, rng.bernoulli(pWin)});
  }
  return out;
}

std::vector<KWiseRanking> sampleKwiseSequential(const MatrixRef& theta, Index k,
                                                std::uint64_t seed, Index rounds) {
  if (k < 1) throw std::invalid_argument("sampleKwiseSequential: k must be >= 1");
  const Index d1 = theta.rows();
  const Index d2 = theta.cols();
  RandomStream rng(seed);

  std::vector<KWiseRanking> out;
  out.reserve(static_cast<std::size_t>(d1) * rounds);
  for (Index round = 0; round < rounds; ++round) {
    for (Index user = 0; user < d1; ++user) {
      KWiseRanking r;
      r.user = user;
      r.items = drawWithReplacement(d2, k, rng);

      std::vector<double> logits(k);
      for (Index j = 0; j < k; ++j) logits[j] = theta(user, r.items[j]);
      std::vector<bool> taken(k, false);
      r.ranking.reserve(k);
      for (Index pick = 0; pick < k; ++pick) {
        const Index pos = drawSoftmax(logits, taken, rng);
        taken[pos] = true;
        r.ranking.push_back(pos);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<KWiseRanking> sampleKwiseGumbel(const MatrixRef& theta, Index k, std::uint64_t seed,
                                            Index rounds) {
  if (k < 1) throw std::invalid_argument("sampleKwiseGumbel: k must be >= 1");
  const Index d1 = theta.rows();
  const Index d2 = theta.cols();
  RandomStream rng(seed);

  std::vector<KWiseRanking> out;
  out.reserve(static_cast<std::size_t>(d1) * rounds);
  for (Index round = 0; round < rounds; ++round) {
    for (Index user = 0; user < d1; ++user) {
      KWiseRanking r;
      r.user = user;
      r.items = drawWithReplacement(d2, k, rng);

      std::vector<double> utility(k);
      for (Index j = 0; j < k; ++j) utility[j] = theta(user, r.items[j]) + rng.gumbel();
      r.ranking.resize(k);
      std::iota(r.ranking.begin(), r.ranking.end(), Index{0});
      std::stable_sort(r.ranking.begin(), r.ranking.end(),
                       [&](Index a, Index b) { return utility[a] > utility[b]; });
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ChoiceObservation> sampleChoices(const MatrixRef& theta, Index k, std::size_t n,
                                             std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("sampleChoices: k must be >= 1");
  const Index d1 = theta.rows();
  const Index d2 = theta.cols();
  RandomStream rng(seed);

  std::vector<ChoiceObservation> out;
  out.reserve(n);
  std::vector<bool> none;
  for (std::size_t i = 0; i < n; ++i) {
    ChoiceObservation c;
    c.user = static_cast<Index>(rng.uniformInt(d1));
    c.offered = drawWithReplacement(d2, k, rng);
    std::vector<double> logits(k);
    for (Index j = 0; j < k; ++j) logits[j] = theta(c.user, c.offered[j]);
    none.assign(k, false);
    c.chosen = drawSoftmax(logits, none, rng);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BundledChoice> sampleBundled(const MatrixRef& theta, Index k1, Index k2,
                                         std::size_t n, std::uint64_t seed) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("sampleBundled: k1 and k2 must be >= 1");
  const Index d1 = theta.rows();
  const Index d2 = theta.cols();
  RandomStream rng(seed);

  std::vector<BundledChoice> out;
  out.reserve(n);
  std::vector<bool> none;
  for (std::size_t i = 0; i < n; ++i) {
    BundledChoice b;
    b.rows = drawWithReplacement(d1, k1, rng);
    b.cols = drawWithReplacement(d2, k2, rng);
    std::vector<double> logits(static_cast<std::size_t>(k1) * k2);
    for (Index a = 0; a < k1; ++a)
      for (Index c = 0; c < k2; ++c) logits[a * k2 + c] = theta(b.rows[a], b.cols[c]);
    none.assign(logits.size(), false);
    const Index cell = drawSoftmax(logits, none, rng);
    b.pickRow = cell / k2;
    b.pickCol = cell % k2;
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace mnl
