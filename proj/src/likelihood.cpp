#include <mnl/likelihood.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mnl {

namespace {

/// Deterministic pairwise tree reduction. The balanced tree keeps the
/// rounding error near log(n) ulps where a running sum accumulates sqrt(n),
/// which matters because the solver certifies descent from tiny objective
/// differences. Destroys the buffer.
double pairwiseSum(std::vector<double>& terms) {
  std::size_t count = terms.size();
  if (count == 0) return 0.0;
  while (count > 1) {
    const std::size_t half = count / 2;
    for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (count % 2 == 1) {
      terms[half] = terms[count - 1];
      count = half + 1;
    } else {
      count = half;
    }
  }
  return terms[0];
}

/// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void checkDims(const MatrixRef& theta, Index d1, Index d2, const char* what) {
  if (theta.rows() != d1 || theta.cols() != d2) {
    throw std::invalid_argument(std::string(what) + ": theta has wrong shape");
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": theta must be finite");
  }
}

/// Per-ranking workspace for the sequential softmax. With one shared max
/// subtraction the step-l denominator is the suffix sum of the ranked
/// weights, so a full ranking costs O(k) instead of O(k^2).
struct RankingSums {
  std::vector<double> weights;     // exp(logit - max) in position order
  std::vector<double> suffixSums;  // suffix sums in rank order
  double maxLogit = 0.0;

  void compute(const MatrixRef& theta, const KWiseRanking& r) {
    const Index k = static_cast<Index>(r.items.size());
    weights.resize(k);
    suffixSums.resize(k);
    maxLogit = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      maxLogit = std::max(maxLogit, theta(r.user, r.items[j]));
    }
    for (Index j = 0; j < k; ++j) {
      weights[j] = std::exp(theta(r.user, r.items[j]) - maxLogit);
    }
    double sum = 0.0;
    for (Index l = k; l-- > 0;) {
      sum += weights[r.ranking[l]];
      suffixSums[l] = sum;
    }
  }
};

}  // namespace

double pairwiseNll(const MatrixRef& theta, const std::vector<PairwiseComparison>& data) {
  if (data.empty()) return 0.0;
  std::vector<double> terms;
  terms.reserve(data.size());
  for (const auto& c : data) {
    const double z = theta(c.user, c.itemA) - theta(c.user, c.itemB);
    terms.push_back(softplus(z) - (c.aWins ? z : 0.0));
  }
  return pairwiseSum(terms) / static_cast<double>(data.size());
}

Matrix pairwiseGrad(const MatrixRef& theta, const std::vector<PairwiseComparison>& data) {
  Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
  if (data.empty()) return grad;
  const double inv = 1.0 / static_cast<double>(data.size());
  for (const auto& c : data) {
    const double z = theta(c.user, c.itemA) - theta(c.user, c.itemB);
    const double coeff = inv * (sigmoid(z) - (c.aWins ? 1.0 : 0.0));
    grad(c.user, c.itemA) += coeff;
    grad(c.user, c.itemB) -= coeff;
  }
  return grad;
}

double kwiseNll(const MatrixRef& theta, const std::vector<KWiseRanking>& data) {
  if (data.empty()) return 0.0;
  const Index k = static_cast<Index>(data.front().items.size());
  std::vector<double> terms;
  terms.reserve(data.size());
  RankingSums sums;
  for (const auto& r : data) {
    sums.compute(theta, r);
    double local = 0.0;
    for (Index l = 0; l < k; ++l) {
      local += sums.maxLogit + std::log(sums.suffixSums[l]) - theta(r.user, r.items[r.ranking[l]]);
    }
    terms.push_back(local);
  }
  return pairwiseSum(terms) / (static_cast<double>(k) * static_cast<double>(data.size()));
}

Matrix kwiseGrad(const MatrixRef& theta, const std::vector<KWiseRanking>& data) {
  Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
  if (data.empty()) return grad;
  const Index k = static_cast<Index>(data.front().items.size());
  const double inv = 1.0 / (static_cast<double>(k) * static_cast<double>(data.size()));
  RankingSums sums;
  std::vector<double> inverseSumPrefix;
  for (const auto& r : data) {
    sums.compute(theta, r);
    // The position picked at step t participates in the softmax of steps
    // 0..t, so its total probability mass is its weight times the prefix sum
    // of the inverse denominators.
    inverseSumPrefix.resize(k);
    double acc = 0.0;
    for (Index l = 0; l < k; ++l) {
      acc += 1.0 / sums.suffixSums[l];
      inverseSumPrefix[l] = acc;
    }
    for (Index l = 0; l < k; ++l) {
      const Index pos = r.ranking[l];
      grad(r.user, r.items[pos]) +=
          inv * (sums.weights[pos] * inverseSumPrefix[l] - 1.0);
    }
  }
  return grad;
}

double rankBrokenNll(const MatrixRef& theta, const BrokenPairSet& broken) {
  if (broken.pairs.empty()) return 0.0;
  std::vector<double> terms;
  terms.reserve(broken.pairs.size());
  for (const auto& p : broken.pairs) {
    const double z = theta(p.user, p.winner) - theta(p.user, p.loser);
    terms.push_back(softplus(-z));
  }
  return pairwiseSum(terms) / static_cast<double>(broken.pairs.size());
}

Matrix rankBrokenGrad(const MatrixRef& theta, const BrokenPairSet& broken) {
  Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
  if (broken.pairs.empty()) return grad;
  const double inv = 1.0 / static_cast<double>(broken.pairs.size());
  for (const auto& p : broken.pairs) {
    const double z = theta(p.user, p.winner) - theta(p.user, p.loser);
    const double coeff = inv * (sigmoid(z) - 1.0);
    grad(p.user, p.winner) += coeff;
    grad(p.user, p.loser) -= coeff;
  }
  return grad;
}

double choiceNll(const MatrixRef& theta, const std::vector<ChoiceObservation>& data) {
  if (data.empty()) return 0.0;
  std::vector<double> terms;
  terms.reserve(data.size());
  std::vector<double> logits;
  for (const auto& c : data) {
    const Index k = static_cast<Index>(c.offered.size());
    logits.resize(k);
    double best = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      logits[j] = theta(c.user, c.offered[j]);
      best = std::max(best, logits[j]);
    }
    double total = 0.0;
    for (Index j = 0; j < k; ++j) total += std::exp(logits[j] - best);
    terms.push_back(best + std::log(total) - logits[c.chosen]);
  }
  return pairwiseSum(terms) / static_cast<double>(data.size());
}

Matrix choiceGrad(const MatrixRef& theta, const std::vector<ChoiceObservation>& data) {
  Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
  if (data.empty()) return grad;
  const double inv = 1.0 / static_cast<double>(data.size());
  std::vector<double> weights;
  for (const auto& c : data) {
    const Index k = static_cast<Index>(c.offered.size());
    weights.resize(k);
    double best = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) best = std::max(best, theta(c.user, c.offered[j]));
    double total = 0.0;
    for (Index j = 0; j < k; ++j) {
      weights[j] = std::exp(theta(c.user, c.offered[j]) - best);
      total += weights[j];
    }
    for (Index j = 0; j < k; ++j) grad(c.user, c.offered[j]) += inv * weights[j] / total;
    grad(c.user, c.offered[c.chosen]) -= inv;
  }
  return grad;
}

double bundledNll(const MatrixRef& theta, const std::vector<BundledChoice>& data) {
  if (data.empty()) return 0.0;
  std::vector<double> terms;
  terms.reserve(data.size());
  for (const auto& b : data) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index a : b.rows)
      for (Index c : b.cols) best = std::max(best, theta(a, c));
    double total = 0.0;
    for (Index a : b.rows)
      for (Index c : b.cols) total += std::exp(theta(a, c) - best);
    terms.push_back(best + std::log(total) - theta(b.rows[b.pickRow], b.cols[b.pickCol]));
  }
  return pairwiseSum(terms) / static_cast<double>(data.size());
}

Matrix bundledGrad(const MatrixRef& theta, const std::vector<BundledChoice>& data) {
  Matrix grad = Matrix::Zero(theta.rows(), theta.cols());
  if (data.empty()) return grad;
  const double inv = 1.0 / static_cast<double>(data.size());
  for (const auto& b : data) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index a : b.rows)
      for (Index c : b.cols) best = std::max(best, theta(a, c));
    double total = 0.0;
    for (Index a : b.rows)
      for (Index c : b.cols) total += std::exp(theta(a, c) - best);
    for (Index a : b.rows)
      for (Index c : b.cols) grad(a, c) += inv * std::exp(theta(a, c) - best) / total;
    grad(b.rows[b.pickRow], b.cols[b.pickCol]) -= inv;
  }
  return grad;
}

LossHandle LossHandle::pairwise(ObservationSet obs) {
  if (obs.kind != ObservationKind::Pairwise) {
    throw std::invalid_argument("LossHandle::pairwise: wrong observation kind");
  }
  obs.validate();
  LossHandle h(LossKind::Pairwise, obs.d1, obs.d2);
  h.data_ = std::move(obs);
  return h;
}

LossHandle LossHandle::kwise(ObservationSet obs) {
  if (obs.kind != ObservationKind::Kwise) {
    throw std::invalid_argument("LossHandle::kwise: wrong observation kind");
  }
  obs.validate();
  LossHandle h(LossKind::Kwise, obs.d1, obs.d2);
  h.data_ = std::move(obs);
  return h;
}

LossHandle LossHandle::choice(ObservationSet obs) {
  if (obs.kind != ObservationKind::Choice) {
    throw std::invalid_argument("LossHandle::choice: wrong observation kind");
  }
  obs.validate();
  LossHandle h(LossKind::Choice, obs.d1, obs.d2);
  h.data_ = std::move(obs);
  return h;
}

LossHandle LossHandle::bundled(ObservationSet obs) {
  if (obs.kind != ObservationKind::Bundled) {
    throw std::invalid_argument("LossHandle::bundled: wrong observation kind");
  }
  obs.validate();
  LossHandle h(LossKind::Bundled, obs.d1, obs.d2);
  h.data_ = std::move(obs);
  return h;
}

LossHandle LossHandle::rankBroken(BrokenPairSet broken, Index d1, Index d2) {
  for (const auto& p : broken.pairs) {
    if (p.user < 0 || p.user >= d1 || p.winner < 0 || p.winner >= d2 || p.loser < 0 ||
        p.loser >= d2) {
      throw std::out_of_range("LossHandle::rankBroken: pair index out of range");
    }
  }
  LossHandle h(LossKind::RankBroken, d1, d2);
  h.data_ = std::move(broken);
  return h;
}

double LossHandle::value(const MatrixRef& theta) const {
  checkDims(theta, d1_, d2_, "LossHandle::value");
  switch (kind_) {
    case LossKind::Pairwise: return pairwiseNll(theta, std::get<ObservationSet>(data_).pairwiseData());
    case LossKind::Kwise: return kwiseNll(theta, std::get<ObservationSet>(data_).kwiseData());
    case LossKind::RankBroken: return rankBrokenNll(theta, std::get<BrokenPairSet>(data_));
    case LossKind::Choice: return choiceNll(theta, std::get<ObservationSet>(data_).choiceData());
    case LossKind::Bundled: return bundledNll(theta, std::get<ObservationSet>(data_).bundledData());
  }
  throw std::logic_error("LossHandle::value: unknown kind");
}

Matrix LossHandle::gradient(const MatrixRef& theta) const {
  checkDims(theta, d1_, d2_, "LossHandle::gradient");
  switch (kind_) {
    case LossKind::Pairwise: return pairwiseGrad(theta, std::get<ObservationSet>(data_).pairwiseData());
    case LossKind::Kwise: return kwiseGrad(theta, std::get<ObservationSet>(data_).kwiseData());
    case LossKind::RankBroken: return rankBrokenGrad(theta, std::get<BrokenPairSet>(data_));
    case LossKind::Choice: return choiceGrad(theta, std::get<ObservationSet>(data_).choiceData());
    case LossKind::Bundled: return bundledGrad(theta, std::get<ObservationSet>(data_).bundledData());
  }
  throw std::logic_error("LossHandle::gradient: unknown kind");
}

double LossHandle::lipschitzBound() const {
  switch (kind_) {
    case LossKind::Pairwise:
    case LossKind::RankBroken:
      return 0.5;
    case LossKind::Kwise:
    case LossKind::Choice:
    case LossKind::Bundled:
      return 1.0;
  }
  return 1.0;
}

}  // namespace mnl
